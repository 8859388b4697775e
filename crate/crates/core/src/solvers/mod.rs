//! Zeroth-order optimizers sharing one driver loop.
//!
//! Each iteration draws `m` perturbations, averages the resulting gradient
//! (and Hessian) estimates, then updates
//!
//! ```text
//! theta_{k+1} = theta_k - a_k [Psi_k(H̄_k)]^{-1} g_k
//! H̄_{k+1}     = H̄_k - w_k (H̄_k - Ĥ_k)
//! ```
//!
//! starting from `H̄_0 = I`. The first-order method keeps `H̄ = I` and skips
//! the mapping. Estimation schemes differ only in how one bundle is formed:
//!
//! | method      | perturbation     | queries per bundle |
//! |-------------|------------------|--------------------|
//! | first order | Gaussian         | 2                  |
//! | Stein       | Gaussian         | 3                  |
//! | 2SPSA       | 2 x Rademacher   | 4                  |

pub(crate) mod spsa2;

pub use spsa2::{estimate_2spsa_bundle, SecondPerturbation};

use crate::error::{Error, Result};
use crate::estimators::{
    average_bundles, estimate_bundle_shared, estimate_gradient, EstimateBundle, GradientEstimator,
    SHARED_BUNDLE_QUERIES,
};
use crate::oracle::NoisyOracle;
use crate::pdmap::{apply_pd_map, solve_preconditioned, symmetric_lambda_min, PdMap};
use crate::rng::RandomStream;
use crate::schedule::GainSchedule;
use crate::vector::ParameterVector;
use crate::{Matrix, Vector};

/// Iterates with a norm above this are treated as divergent.
pub const DIVERGENCE_NORM: f64 = 1e12;

/// Reject a step when a fresh noisy loss at the candidate exceeds a fresh
/// noisy loss at the current iterate by more than `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Blocking {
    pub tolerance: f64,
}

/// Queries spent per blocking check.
pub const BLOCKING_QUERIES: u64 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub schedule: GainSchedule,
    pub pd_map: PdMap,
    pub queries_per_iter: u64,
    pub iterations: usize,
    pub blocking: Option<Blocking>,
    /// First-order iterations run before the main loop. They use the
    /// leading gains of the schedule; the main loop continues from there.
    pub warm_start_iters: usize,
}

impl SolverConfig {
    pub fn new(schedule: GainSchedule, iterations: usize, queries_per_iter: u64) -> Self {
        Self {
            schedule,
            pd_map: PdMap::default(),
            queries_per_iter,
            iterations,
            blocking: None,
            warm_start_iters: 0,
        }
    }

    pub fn with_pd_map(mut self, pd_map: PdMap) -> Self {
        self.pd_map = pd_map;
        self
    }

    pub fn with_blocking(mut self, tolerance: f64) -> Self {
        self.blocking = Some(Blocking { tolerance });
        self
    }

    pub fn with_warm_start(mut self, iters: usize) -> Self {
        self.warm_start_iters = iters;
        self
    }

    /// Bundles per iteration for a scheme costing `bundle_cost` queries.
    pub fn bundles_per_iter(&self, bundle_cost: u64) -> Result<u64> {
        if self.queries_per_iter == 0 || self.queries_per_iter % bundle_cost != 0 {
            return Err(Error::invalid(format!(
                "queries per iteration ({}) must be a positive multiple of {bundle_cost}",
                self.queries_per_iter
            )));
        }
        Ok(self.queries_per_iter / bundle_cost)
    }

    /// Full validation for a scheme whose estimates cost `bundle_cost`
    /// queries each.
    pub fn validate_for(&self, bundle_cost: u64) -> Result<()> {
        self.validate()?;
        self.bundles_per_iter(bundle_cost).map(|_| ())
    }

    fn validate(&self) -> Result<()> {
        self.pd_map.validate()?;
        if let Some(b) = self.blocking {
            if !(b.tolerance > 0.0) {
                return Err(Error::invalid(format!(
                    "blocking tolerance must be positive, got {}",
                    b.tolerance
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub queries: u64,
    pub theta: Vector,
    /// Noise-free loss at `theta`, outside the query ledger.
    pub loss: f64,
    pub lambda_min_hbar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    /// `H̄` after the last completed iteration.
    pub final_hbar: Matrix,
}

impl RunTrace {
    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("a trace always holds the initial record")
    }

    pub fn final_theta(&self) -> &Vector {
        &self.last().theta
    }
}

/// Mutable state of one run.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub theta: Vector,
    pub hbar: Matrix,
    pub k: usize,
    pub cumulative_queries: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scheme {
    FirstOrder,
    Stein,
    Spsa2(SecondPerturbation),
}

impl Scheme {
    fn bundle_cost(self) -> u64 {
        match self {
            Scheme::FirstOrder => GradientEstimator::TwoPointCentral.queries(),
            Scheme::Stein => SHARED_BUNDLE_QUERIES,
            Scheme::Spsa2(_) => spsa2::BUNDLE_QUERIES,
        }
    }

    fn uses_hessian(self) -> bool {
        !matches!(self, Scheme::FirstOrder)
    }
}

/// First-order iteration `theta_{k+1} = theta_k - a_k g_k` with averaged
/// central-difference Gaussian gradient estimates.
pub fn run_first_order<O: NoisyOracle + ?Sized>(
    oracle: &mut O,
    config: &SolverConfig,
    theta0: &ParameterVector,
    stream: &mut RandomStream,
) -> Result<RunTrace> {
    drive(Scheme::FirstOrder, oracle, config, theta0, stream)
}

/// Damped stochastic Newton with shared-query Stein estimates: each bundle
/// of three queries yields both the central gradient and the three-point
/// Hessian.
pub fn run_stein_second_order<O: NoisyOracle + ?Sized>(
    oracle: &mut O,
    config: &SolverConfig,
    theta0: &ParameterVector,
    stream: &mut RandomStream,
) -> Result<RunTrace> {
    drive(Scheme::Stein, oracle, config, theta0, stream)
}

/// Second-order SPSA with two Rademacher perturbations and four queries
/// per Hessian estimate.
pub fn run_2spsa<O: NoisyOracle + ?Sized>(
    oracle: &mut O,
    config: &SolverConfig,
    theta0: &ParameterVector,
    stream: &mut RandomStream,
    second: SecondPerturbation,
) -> Result<RunTrace> {
    second.validate()?;
    drive(Scheme::Spsa2(second), oracle, config, theta0, stream)
}

fn estimate<O: NoisyOracle + ?Sized>(
    scheme: Scheme,
    oracle: &mut O,
    theta: &Vector,
    schedule_index: usize,
    schedule: &GainSchedule,
    stream: &mut RandomStream,
) -> Result<EstimateBundle> {
    let p = theta.len();
    let c = schedule.at(schedule_index).c;
    match scheme {
        Scheme::FirstOrder => {
            let u = stream.standard_normal_vector(p);
            let gradient =
                estimate_gradient(GradientEstimator::TwoPointCentral, oracle, theta, c, &u)?;
            Ok(EstimateBundle {
                gradient,
                hessian: Matrix::zeros(0, 0),
                queries_used: GradientEstimator::TwoPointCentral.queries(),
            })
        }
        Scheme::Stein => {
            let u = stream.standard_normal_vector(p);
            estimate_bundle_shared(oracle, theta, c, &u)
        }
        Scheme::Spsa2(second) => {
            let delta = stream.rademacher_vector(p);
            let delta_tilde = stream.rademacher_vector(p);
            let c_tilde = second.at(schedule_index);
            estimate_2spsa_bundle(oracle, theta, c, c_tilde, &delta, &delta_tilde)
        }
    }
}

fn averaged_estimate<O: NoisyOracle + ?Sized>(
    scheme: Scheme,
    bundles: u64,
    oracle: &mut O,
    theta: &Vector,
    schedule_index: usize,
    schedule: &GainSchedule,
    stream: &mut RandomStream,
) -> Result<EstimateBundle> {
    let estimates = (0..bundles)
        .map(|_| estimate(scheme, oracle, theta, schedule_index, schedule, stream))
        .collect::<Result<Vec<_>>>()?;
    if scheme.uses_hessian() {
        average_bundles(&estimates)
    } else {
        let m = estimates.len() as f64;
        let mut gradient = Vector::zeros(theta.len());
        for e in &estimates {
            gradient += &e.gradient;
        }
        Ok(EstimateBundle {
            gradient: gradient / m,
            hessian: Matrix::zeros(0, 0),
            queries_used: estimates.iter().map(|e| e.queries_used).sum(),
        })
    }
}

fn is_finite_vec(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn is_finite_mat(m: &Matrix) -> bool {
    m.iter().all(|x| x.is_finite())
}

fn drive<O: NoisyOracle + ?Sized>(
    scheme: Scheme,
    oracle: &mut O,
    config: &SolverConfig,
    theta0: &ParameterVector,
    stream: &mut RandomStream,
) -> Result<RunTrace> {
    config.validate()?;
    let p = theta0.dim();
    if oracle.dim() != p {
        return Err(Error::invalid(format!(
            "oracle dimension {} does not match initial iterate dimension {p}",
            oracle.dim()
        )));
    }
    let bundles = config.bundles_per_iter(scheme.bundle_cost())?;
    let schedule = &config.schedule;
    let start_queries = oracle.query_count();

    let mut state = SolverState {
        theta: theta0.as_dvector().clone(),
        hbar: Matrix::identity(p, p),
        k: 0,
        cumulative_queries: 0,
    };

    // Warm start: plain first-order steps, charged to the ledger.
    if config.warm_start_iters > 0 {
        let warm_bundles = (config.queries_per_iter / 2).max(1);
        for j in 0..config.warm_start_iters {
            let est = averaged_estimate(
                Scheme::FirstOrder,
                warm_bundles,
                oracle,
                &state.theta,
                j,
                schedule,
                stream,
            )?;
            state.theta -= est.gradient * schedule.at(j).a;
            if !is_finite_vec(&state.theta) || state.theta.norm() > DIVERGENCE_NORM {
                let trace = RunTrace {
                    records: vec![record(oracle, &state, 1.0)],
                    final_hbar: state.hbar.clone(),
                };
                return Err(Error::Diverged {
                    iteration: 0,
                    trace: Box::new(trace),
                });
            }
        }
    }
    state.cumulative_queries = oracle.query_count() - start_queries;

    let lambda = |s: &SolverState| {
        if scheme.uses_hessian() {
            symmetric_lambda_min(&s.hbar)
        } else {
            1.0
        }
    };
    let mut records = Vec::with_capacity(config.iterations + 1);
    records.push(record(oracle, &state, lambda(&state)));

    for k in 0..config.iterations {
        let idx = config.warm_start_iters + k;
        let gains = schedule.at(idx);
        let est = averaged_estimate(scheme, bundles, oracle, &state.theta, idx, schedule, stream)?;

        let direction = if scheme.uses_hessian() {
            let mapped = apply_pd_map(&config.pd_map, &state.hbar, k)?;
            solve_preconditioned(&mapped, &est.gradient)?
        } else {
            est.gradient.clone()
        };
        let candidate = &state.theta - direction * gains.a;

        let accept = match config.blocking {
            Some(b) if is_finite_vec(&candidate) => {
                let current = oracle.query_aux(&state.theta);
                let proposed = oracle.query_aux(&candidate);
                !(proposed > current + b.tolerance)
            }
            _ => true,
        };
        if accept {
            state.theta = candidate;
        }
        if scheme.uses_hessian() {
            state.hbar = &state.hbar - (&state.hbar - &est.hessian) * gains.w;
        }
        state.k = k + 1;
        state.cumulative_queries = oracle.query_count() - start_queries;

        let diverged = !is_finite_vec(&state.theta)
            || state.theta.norm() > DIVERGENCE_NORM
            || !is_finite_mat(&state.hbar);
        if diverged {
            return Err(Error::Diverged {
                iteration: k + 1,
                trace: Box::new(RunTrace {
                    records,
                    final_hbar: state.hbar,
                }),
            });
        }
        records.push(record(oracle, &state, lambda(&state)));
    }

    Ok(RunTrace {
        records,
        final_hbar: state.hbar,
    })
}

fn record<O: NoisyOracle + ?Sized>(oracle: &O, state: &SolverState, lambda_min_hbar: f64) -> TraceRecord {
    TraceRecord {
        k: state.k,
        queries: state.cumulative_queries,
        theta: state.theta.clone(),
        loss: oracle.loss_metric(&state.theta),
        lambda_min_hbar,
    }
}
