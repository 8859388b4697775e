use std::fmt::Write as _;
use std::path::Path;

use super::{format_float, run_experiment, ExperimentConfig, ExperimentSummary};
use crate::error::{Error, Result};

/// Final normalized losses of replicate `replicate` under both configs.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedResult {
    pub replicate: usize,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub label_a: String,
    pub label_b: String,
    pub pairs: Vec<PairedResult>,
    /// Mean of `a - b`.
    pub mean_difference: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
}

impl Comparison {
    fn from_pairs(label_a: String, label_b: String, pairs: Vec<PairedResult>) -> Self {
        let n = pairs.len() as f64;
        let mean = |f: &dyn Fn(&PairedResult) -> f64| pairs.iter().map(f).sum::<f64>() / n;
        let mean_a = mean(&|p| p.a);
        let mean_b = mean(&|p| p.b);
        // Identical values (including two divergences) are ties, so a
        // self-comparison has difference 0 rather than inf - inf.
        let mean_difference = mean(&|p| if p.a == p.b { 0.0 } else { p.a - p.b });
        let wins_a = pairs.iter().filter(|p| p.a < p.b).count();
        let wins_b = pairs.iter().filter(|p| p.b < p.a).count();
        Self {
            ties: pairs.len() - wins_a - wins_b,
            label_a,
            label_b,
            pairs,
            mean_difference,
            mean_a,
            mean_b,
            wins_a,
            wins_b,
        }
    }

    /// Fraction of pairs where `a` is strictly lower.
    pub fn win_rate_a(&self) -> f64 {
        self.wins_a as f64 / self.pairs.len() as f64
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>9}  {:>24}  {:>24}", "replicate", self.label_a, self.label_b);
        for p in &self.pairs {
            let _ = writeln!(s, "{:>9}  {:>24.6e}  {:>24.6e}", p.replicate, p.a, p.b);
        }
        let _ = writeln!(s, "{:>9}  {:>24.6e}  {:>24.6e}", "mean", self.mean_a, self.mean_b);
        let _ = writeln!(s, "mean difference ({} - {}): {:.6e}", self.label_a, self.label_b, self.mean_difference);
        let _ = writeln!(
            s,
            "wins: {} {}, {} {}, ties {} (win rate {}: {:.3})",
            self.label_a,
            self.wins_a,
            self.label_b,
            self.wins_b,
            self.ties,
            self.label_a,
            self.win_rate_a()
        );
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["replicate", "final_normalized_a", "final_normalized_b", "difference"])?;
        for p in &self.pairs {
            let d = if p.a == p.b { 0.0 } else { p.a - p.b };
            w.write_record([
                p.replicate.to_string(),
                format_float(p.a),
                format_float(p.b),
                format_float(d),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_comparable(a: &ExperimentConfig, b: &ExperimentConfig) -> Result<()> {
    let mut diffs = Vec::new();
    if a.problem != b.problem {
        diffs.push("problem");
    }
    if a.queries_per_iter != b.queries_per_iter {
        diffs.push("queries_per_iter");
    }
    if a.iterations != b.iterations {
        diffs.push("iterations");
    }
    if a.warm_start != b.warm_start || a.blocking.is_some() != b.blocking.is_some() {
        diffs.push("warm_start/blocking budget");
    }
    if a.base_seed != b.base_seed {
        diffs.push("base_seed");
    }
    if a.replicates != b.replicates {
        diffs.push("replicates");
    }
    if a.theta0 != b.theta0 {
        diffs.push("theta0");
    }
    if !diffs.is_empty() {
        return Err(Error::invalid(format!(
            "configs are not comparable; they differ in: {}",
            diffs.join(", ")
        )));
    }
    if a.output_dir == b.output_dir {
        return Err(Error::invalid("the two configs must write to different output_dir values"));
    }
    Ok(())
}

/// Runs both configurations and pairs final normalized losses by replicate.
/// Refuses configurations that differ in problem, budget, seeds, or start.
pub fn compare_solvers(
    a: &ExperimentConfig,
    b: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<(Comparison, ExperimentSummary, ExperimentSummary)> {
    check_comparable(a, b)?;
    let sa = run_experiment(a, jobs)?;
    let sb = run_experiment(b, jobs)?;
    let pairs = sa
        .replicates
        .iter()
        .zip(&sb.replicates)
        .map(|(ra, rb)| PairedResult {
            replicate: ra.replicate,
            a: ra.final_normalized(),
            b: rb.final_normalized(),
        })
        .collect();
    let label = |c: &ExperimentConfig, other: &ExperimentConfig| {
        if c.solver == other.solver {
            format!("{}({})", c.solver.name(), c.output_dir.display())
        } else {
            c.solver.name().to_string()
        }
    };
    let cmp = Comparison::from_pairs(label(a, b), label(b, a), pairs);
    Ok((cmp, sa, sb))
}
