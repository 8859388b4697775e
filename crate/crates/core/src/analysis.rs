//! Replicate aggregation, normalized distances, RMS rate fits, and the
//! asymptotic-normality moment check on quadratics.

use crate::error::{Error, Result};
use crate::oracle::ObjectiveOracle;
use crate::problems::QuadraticProblem;
use crate::rng::{RandomStream, StreamPurpose};
use crate::solvers::{run_stein_second_order, RunTrace, SolverConfig};
use crate::{Matrix, ParameterVector, Vector};

/// Pointwise mean and standard error of a per-record metric across replicates.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateCurve {
    /// Iteration index of each point.
    pub x: Vec<usize>,
    /// Cumulative queries at each point.
    pub queries: Vec<u64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_replicates: usize,
}

impl AggregateCurve {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// `(loss_k - f_opt) / (f_init - f_opt)` for every record.
pub fn normalized_distance(trace: &RunTrace, f_opt: f64, f_init: f64) -> Result<Vec<f64>> {
    if !(f_init > f_opt) || !f_opt.is_finite() || !f_init.is_finite() {
        return Err(Error::invalid(format!(
            "normalized distance needs f_init > f_opt (got f_init={f_init}, f_opt={f_opt})"
        )));
    }
    let span = f_init - f_opt;
    Ok(trace.records.iter().map(|r| (r.loss - f_opt) / span).collect())
}

fn check_grid(traces: &[RunTrace]) -> Result<()> {
    let first = traces
        .first()
        .ok_or_else(|| Error::invalid("cannot aggregate zero traces"))?;
    for (i, t) in traces.iter().enumerate().skip(1) {
        let same = t.records.len() == first.records.len()
            && t
                .records
                .iter()
                .zip(&first.records)
                .all(|(a, b)| a.k == b.k && a.queries == b.queries);
        if !same {
            return Err(Error::invalid(format!(
                "trace {i} does not share the iteration grid of trace 0"
            )));
        }
    }
    Ok(())
}

/// Mean and standard error (sample SD over `sqrt(n)`) of `metric(trace, i)`
/// at each record index `i`.
pub fn aggregate_replicates<F>(traces: &[RunTrace], metric: F) -> Result<AggregateCurve>
where
    F: Fn(&RunTrace, usize) -> f64,
{
    check_grid(traces)?;
    let n = traces.len();
    let grid = &traces[0].records;
    let mut mean = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let values: Vec<f64> = traces.iter().map(|t| metric(t, i)).collect();
        let (m, se) = mean_and_stderr(&values);
        mean.push(m);
        stderr.push(se);
    }
    Ok(AggregateCurve {
        x: grid.iter().map(|r| r.k).collect(),
        queries: grid.iter().map(|r| r.queries).collect(),
        mean,
        stderr,
        n_replicates: n,
    })
}

/// Sample mean and its standard error; the error is 0 for a single value.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `sqrt(mean_r ||theta_k^r - theta*||^2)` at every record. The stderr field
/// holds the standard error of the mean squared error, propagated through
/// the square root.
pub fn rms_error_curve(traces: &[RunTrace], theta_star: &Vector) -> Result<AggregateCurve> {
    let sq = aggregate_replicates(traces, |t, i| {
        (&t.records[i].theta - theta_star).norm_squared()
    })?;
    let mean: Vec<f64> = sq.mean.iter().map(|m| m.sqrt()).collect();
    let stderr = sq
        .stderr
        .iter()
        .zip(&mean)
        .map(|(se, rms)| if *rms > 0.0 { se / (2.0 * rms) } else { 0.0 })
        .collect();
    Ok(AggregateCurve { mean, stderr, ..sq })
}

/// Least-squares slope of `log(mean)` against `log(x)` over points with
/// `k_min <= x <= k_max`.
pub fn fit_rate_exponent(curve: &AggregateCurve, k_min: usize, k_max: usize) -> Result<f64> {
    if k_min >= k_max || k_min == 0 {
        return Err(Error::invalid(format!(
            "need 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    let points: Vec<(f64, f64)> = curve
        .x
        .iter()
        .zip(&curve.mean)
        .filter(|(k, _)| (k_min..=k_max).contains(*k))
        .map(|(&k, &e)| (k as f64, e))
        .collect();
    if points.len() < 2 {
        return Err(Error::invalid("fewer than two grid points inside the fit window"));
    }
    if let Some((k, e)) = points.iter().find(|(_, e)| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::invalid(format!("nonpositive value {e} at k={k}")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(k, e)| (k.ln(), e.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Empirical and predicted moments of `k^{tau/2} (theta_K - theta*)`.
#[derive(Clone, Debug)]
pub struct NormalityDiagnostic {
    pub tau: f64,
    pub tau_plus: f64,
    pub empirical_mean: ParameterVector,
    pub empirical_cov: Matrix,
    pub predicted_mean: ParameterVector,
    pub predicted_cov: Matrix,
    pub n_replicates: usize,
    /// Replicates that hit the divergence guard and were left out.
    pub diverged: usize,
    /// Set when fewer than two replicates were available, so the covariance
    /// is the zero matrix.
    pub degenerate: bool,
}

impl NormalityDiagnostic {
    /// Standard error of each coordinate of the empirical mean.
    pub fn mean_stderr(&self) -> Vector {
        let n = (self.n_replicates - self.diverged).max(1) as f64;
        self.empirical_cov.diagonal().map(|v| (v / n).sqrt())
    }
}

/// `(tau, tau_plus)` for the exponents of a schedule.
pub fn normality_exponents(alpha: f64, gamma: f64) -> (f64, f64) {
    let tau = alpha - 2.0 * gamma;
    let tau_plus = if alpha == 1.0 { tau } else { 0.0 };
    (tau, tau_plus)
}

/// Limit covariance `a^2 Var[y] / (2 c^2 (2a - tau_plus)) H^{-2}`, divided by
/// the number of averaged estimates per iteration.
pub fn predicted_covariance(
    h: &Matrix,
    a: f64,
    c: f64,
    tau_plus: f64,
    noise_variance: f64,
    bundles: usize,
) -> Result<Matrix> {
    if !(2.0 * a > tau_plus) {
        return Err(Error::invalid("limit covariance requires 2a > tau_plus"));
    }
    let h_inv = h
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid("Hessian at the optimum must be positive definite"))?
        .inverse();
    let scale = a * a * noise_variance / (2.0 * c * c * (2.0 * a - tau_plus) * bundles as f64);
    let lambda = &h_inv * &h_inv * scale;
    Ok((&lambda + lambda.transpose()) * 0.5)
}

/// Limit mean `a c^2 / (3 tau_plus - 6a) H^{-1} m3`, where `m3` is the
/// Gaussian moment `E[f'''(theta*)(u, u, u) u]`.
pub fn predicted_mean(h: &Matrix, a: f64, c: f64, tau_plus: f64, m3: &Vector) -> Result<Vector> {
    let denom = 3.0 * tau_plus - 6.0 * a;
    if denom == 0.0 {
        return Err(Error::invalid("limit mean undefined when 6a = 3 tau_plus"));
    }
    let chol = h
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid("Hessian at the optimum must be positive definite"))?;
    Ok(chol.solve(m3) * (a * c * c / denom))
}

/// Runs `n_replicates` of the Stein second-order method on `problem` from
/// `theta0` and compares the moments of the scaled final error with the
/// limit law. Replicate `r` draws its streams from `(base_seed, r)`.
pub fn normality_check_quadratic(
    problem: &QuadraticProblem,
    config: &SolverConfig,
    theta0: &ParameterVector,
    n_replicates: usize,
    base_seed: u64,
) -> Result<NormalityDiagnostic> {
    if n_replicates == 0 {
        return Err(Error::invalid("need at least one replicate"));
    }
    let schedule = &config.schedule;
    let (alpha, gamma, a, c) = (schedule.alpha(), schedule.gamma(), schedule.a(), schedule.c());
    let (tau, tau_plus) = normality_exponents(alpha, gamma);
    if alpha > 6.0 * gamma {
        return Err(Error::invalid(format!(
            "normality condition alpha <= 6 gamma violated (alpha={alpha}, gamma={gamma})"
        )));
    }
    let h = problem.hessian();
    let lambda_min = crate::pdmap::symmetric_lambda_min(h);
    if !(a > tau_plus / (2.0 * lambda_min)) {
        return Err(Error::invalid(format!(
            "normality condition a > tau_plus / (2 lambda_min(H)) violated \
             (a={a}, tau_plus={tau_plus}, lambda_min={lambda_min})"
        )));
    }
    let bundles = config.bundles_per_iter(crate::estimators::SHARED_BUNDLE_QUERIES)? as usize;
    let p = theta0.dim();
    let theta_star = problem.optimum();
    let scale = (config.iterations as f64).powf(tau / 2.0);

    let run = |r: usize| -> Option<Vector> {
        let mut oracle = ObjectiveOracle::new(
            problem,
            RandomStream::for_replicate(base_seed, r as u64, StreamPurpose::Noise),
            RandomStream::for_replicate(base_seed, r as u64, StreamPurpose::AuxNoise),
        );
        let mut stream = RandomStream::for_replicate(base_seed, r as u64, StreamPurpose::Perturbation);
        run_stein_second_order(&mut oracle, config, theta0, &mut stream)
            .ok()
            .map(|t| (t.final_theta() - &theta_star) * scale)
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Option<Vector>> = {
        use rayon::prelude::*;
        (0..n_replicates).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Option<Vector>> = (0..n_replicates).map(run).collect();

    let samples: Vec<Vector> = outcomes.iter().flatten().cloned().collect();
    let diverged = n_replicates - samples.len();
    let n = samples.len();
    let mut mean = Vector::zeros(p);
    for s in &samples {
        mean += s;
    }
    if n > 0 {
        mean /= n as f64;
    }
    let mut cov = Matrix::zeros(p, p);
    if n >= 2 {
        for s in &samples {
            let d = s - &mean;
            cov += &d * d.transpose();
        }
        cov /= (n - 1) as f64;
    }
    Ok(NormalityDiagnostic {
        tau,
        tau_plus,
        empirical_mean: ParameterVector::from_dvector_unchecked(mean),
        empirical_cov: cov,
        predicted_mean: ParameterVector::from_dvector_unchecked(Vector::zeros(p)),
        predicted_cov: predicted_covariance(h, a, c, tau_plus, problem.noise_sigma2(), bundles)?,
        n_replicates,
        diverged,
        degenerate: n < 2,
    })
}
