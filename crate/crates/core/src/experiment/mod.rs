//! Replicated experiments driven by a flat `key = value` config.
//!
//! [`run_experiment`] executes every replicate of one configuration and
//! writes `trace_r{r}.csv` per replicate plus `replicates.csv` and
//! `summary.csv`. [`compare_solvers`] runs two configurations on the same
//! problem, seeds, and budget and pairs their final normalized losses.

mod compare;
mod config;
mod output;

use std::path::Path;

pub use compare::{compare_solvers, Comparison, PairedResult};
pub use config::{
    parse_pd_map, DataSource, ExperimentConfig, InitSpec, ProblemSpec, RawConfig, SolverKind,
    SEED_ENV,
};
pub use output::{format_float, read_trace_csv, write_trace_csv, TraceRow, TRACE_HEADER};

use crate::analysis::{aggregate_replicates, AggregateCurve};
use crate::error::{Error, Result};
use crate::oracle::{Objective, ObjectiveOracle};
use crate::problems::{
    generate_synthetic_classification, load_libsvm, CorrEntropyProblem, QuadraticProblem,
    SkewedQuartic,
};
use crate::rng::{RandomStream, StreamPurpose};
use crate::solvers::{run_2spsa, run_first_order, run_stein_second_order, RunTrace};
use crate::{ParameterVector, Vector};

/// A problem built from a [`ProblemSpec`].
#[derive(Clone, Debug)]
pub enum ProblemInstance {
    SkewedQuartic(SkewedQuartic),
    Quadratic(QuadraticProblem),
    CorrEntropy(CorrEntropyProblem),
}

impl ProblemInstance {
    /// Builds the problem. A synthetic dataset is drawn once from the data
    /// stream of `base_seed` and shared by all replicates.
    pub fn build(spec: &ProblemSpec, base_seed: u64) -> Result<Self> {
        let as_config = |e: Error| match e {
            Error::Io(io) => Error::Config(io.to_string()),
            other => other,
        };
        Ok(match spec {
            ProblemSpec::SkewedQuartic {
                dim,
                noise_variance,
            } => ProblemInstance::SkewedQuartic(SkewedQuartic::new(*dim, *noise_variance)?),
            ProblemSpec::Quadratic {
                diagonal,
                noise_variance,
            } => ProblemInstance::Quadratic(QuadraticProblem::diagonal(diagonal, *noise_variance)?),
            ProblemSpec::CorrEntropy { data, kappa, batch } => {
                let data = match data {
                    DataSource::Libsvm { path, dim } => load_libsvm(path, *dim).map_err(as_config)?,
                    DataSource::Synthetic {
                        dim,
                        samples,
                        separation,
                    } => generate_synthetic_classification(
                        *dim,
                        *samples,
                        *separation,
                        &mut RandomStream::for_replicate(base_seed, 0, StreamPurpose::Data),
                    )?,
                };
                ProblemInstance::CorrEntropy(CorrEntropyProblem::new(&data, *kappa, *batch)?)
            }
        })
    }

    fn inner(&self) -> &dyn Objective {
        match self {
            ProblemInstance::SkewedQuartic(p) => p,
            ProblemInstance::Quadratic(p) => p,
            ProblemInstance::CorrEntropy(p) => p,
        }
    }
}

impl Objective for ProblemInstance {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn value(&self, theta: &Vector) -> f64 {
        self.inner().value(theta)
    }

    fn observe(&self, theta: &Vector, noise: &mut RandomStream) -> f64 {
        self.inner().observe(theta, noise)
    }

    fn optimal_value(&self) -> Option<f64> {
        self.inner().optimal_value()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReplicateStatus {
    Completed,
    Diverged { iteration: usize },
}

/// One replicate's trace and normalization constants.
#[derive(Clone, Debug)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub status: ReplicateStatus,
    pub trace: RunTrace,
    pub f_opt: f64,
    pub f_init: f64,
}

impl ReplicateOutcome {
    /// `(loss - f_opt) / (f_init - f_opt)` per record; `NaN` when the start
    /// is already optimal.
    pub fn normalized(&self) -> Vec<f64> {
        let span = self.f_init - self.f_opt;
        self.trace
            .records
            .iter()
            .map(|r| {
                if span > 0.0 {
                    (r.loss - self.f_opt) / span
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    /// Final normalized loss; `+inf` for a diverged replicate.
    pub fn final_normalized(&self) -> f64 {
        match self.status {
            ReplicateStatus::Completed => *self.normalized().last().expect("nonempty trace"),
            ReplicateStatus::Diverged { .. } => f64::INFINITY,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSummary {
    pub replicates: Vec<ReplicateOutcome>,
    /// Mean loss over completed replicates.
    pub loss_curve: AggregateCurve,
    /// Mean normalized loss over completed replicates.
    pub normalized_curve: AggregateCurve,
}

impl ExperimentSummary {
    pub fn completed(&self) -> impl Iterator<Item = &ReplicateOutcome> {
        self.replicates
            .iter()
            .filter(|r| r.status == ReplicateStatus::Completed)
    }
}

fn initial_point(config: &ExperimentConfig, p: usize, replicate: usize) -> Result<ParameterVector> {
    match config.theta0 {
        InitSpec::Constant(x) => ParameterVector::from_element(p, x),
        InitSpec::Uniform(r) => {
            let mut s = RandomStream::for_replicate(config.base_seed, replicate as u64, StreamPurpose::Init);
            ParameterVector::new((0..p).map(|_| s.uniform(-r, r)).collect())
        }
    }
}

/// Runs replicate `r` in memory. Every random stream is derived from
/// `(base_seed, r)`, so the result does not depend on scheduling.
pub fn run_replicate(
    config: &ExperimentConfig,
    problem: &ProblemInstance,
    replicate: usize,
) -> Result<ReplicateOutcome> {
    let seed = config.base_seed;
    let r = replicate as u64;
    let theta0 = initial_point(config, problem.dim(), replicate)?;
    let f_opt = problem.optimal_value().unwrap_or(0.0);
    let f_init = problem.value(&theta0);
    let mut oracle = ObjectiveOracle::new(
        problem,
        RandomStream::for_replicate(seed, r, StreamPurpose::Noise),
        RandomStream::for_replicate(seed, r, StreamPurpose::AuxNoise),
    );
    let mut stream = RandomStream::for_replicate(seed, r, StreamPurpose::Perturbation);
    let solver_config = config.solver_config();
    let result = match config.solver {
        SolverKind::FirstOrder => run_first_order(&mut oracle, &solver_config, &theta0, &mut stream),
        SolverKind::Stein2 => run_stein_second_order(&mut oracle, &solver_config, &theta0, &mut stream),
        SolverKind::Spsa2 => run_2spsa(
            &mut oracle,
            &solver_config,
            &theta0,
            &mut stream,
            config.second_perturbation,
        ),
    };
    let (status, trace) = match result {
        Ok(trace) => (ReplicateStatus::Completed, trace),
        Err(Error::Diverged { iteration, trace }) => (ReplicateStatus::Diverged { iteration }, *trace),
        Err(e) => return Err(e),
    };
    Ok(ReplicateOutcome {
        replicate,
        status,
        trace,
        f_opt,
        f_init,
    })
}

fn map_replicates<T: Send>(
    n: usize,
    jobs: Option<usize>,
    f: impl Fn(usize) -> Result<T> + Send + Sync,
) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(j) = jobs {
            builder = builder.num_threads(j.max(1));
        }
        let pool = builder
            .build()
            .map_err(|e| Error::Numerical(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..n).into_par_iter().map(&f).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        (0..n).map(f).collect()
    }
}

/// Runs all replicates with at most `jobs` workers (all cores when `None`)
/// and writes the CSV outputs into `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentSummary> {
    let problem = ProblemInstance::build(&config.problem, config.base_seed)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir)?;
    let replicates = map_replicates(config.replicates, jobs, |r| {
        let outcome = run_replicate(config, &problem, r)?;
        write_trace_csv(
            dir.join(format!("trace_r{r}.csv")),
            &outcome.trace,
            &outcome.normalized(),
        )?;
        Ok(outcome)
    })?;
    output::write_replicates_csv(dir.join("replicates.csv"), &replicates)?;

    let done: Vec<&ReplicateOutcome> = replicates
        .iter()
        .filter(|r| r.status == ReplicateStatus::Completed)
        .collect();
    if done.is_empty() {
        return Err(Error::Numerical(format!(
            "all {} replicates diverged; see {}",
            replicates.len(),
            dir.join("replicates.csv").display()
        )));
    }
    let traces: Vec<RunTrace> = done.iter().map(|r| r.trace.clone()).collect();
    let loss_curve = aggregate_replicates(&traces, |t, i| t.records[i].loss)?;
    // Same grid with the loss column replaced by its normalized value.
    let normalized_traces: Vec<RunTrace> = done
        .iter()
        .map(|r| {
            let mut t = r.trace.clone();
            for (rec, v) in t.records.iter_mut().zip(r.normalized()) {
                rec.loss = v;
            }
            t
        })
        .collect();
    let normalized_curve = aggregate_replicates(&normalized_traces, |t, i| t.records[i].loss)?;
    output::write_summary_csv(dir.join("summary.csv"), &loss_curve, &normalized_curve)?;
    Ok(ExperimentSummary {
        replicates,
        loss_curve,
        normalized_curve,
    })
}

/// Loads a config file with `STEINZO_SEED` and `--set` overrides applied.
pub fn load_config(path: impl AsRef<Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path, overrides)
}
