//! Zeroth-order stochastic optimization driven by Stein-identity estimators.
//!
//! The crate estimates gradients and Hessians of a noisy loss from function
//! values alone, using a single Gaussian perturbation per estimate, and feeds
//! them into a damped stochastic Newton recursion. A first-order SPSA-style
//! scheme and the 2SPSA baseline share the same oracle, schedule, and trace
//! machinery so the methods can be compared query for query.
//!
//! Module map:
//!
//! * [`rng`], [`vector`], [`schedule`], [`oracle`]: random streams, iterates,
//!   gain sequences, and the query-counting oracle abstraction.
//! * [`estimators`]: the one/two/three-query gradient and Hessian estimators.
//! * [`pdmap`]: positive-definite mappings applied before inversion.
//! * [`solvers`]: first-order, Stein second-order, and 2SPSA drivers.
//! * [`problems`]: benchmark losses, LIBSVM ingestion, synthetic data.
//! * [`analysis`]: replicate aggregation, rate fits, normality moments.
//! * [`experiment`]: config files, replicated runs, CSV output.

pub mod analysis;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod oracle;
pub mod pdmap;
pub mod problems;
pub mod rng;
pub mod schedule;
pub mod solvers;
pub mod vector;

pub use error::{Error, Result};
pub use estimators::{EstimateBundle, GradientEstimator, HessianEstimator};
pub use oracle::{FnOracle, NoisyOracle, Objective, ObjectiveOracle};
pub use pdmap::{DeltaFloor, EpsilonSchedule, PdMap};
pub use rng::{RandomStream, StreamPurpose};
pub use schedule::{GainSchedule, Gains, WeightSchedule};
pub use solvers::{RunTrace, SolverConfig, TraceRecord};
pub use vector::ParameterVector;

/// Dense column vector used for iterates, perturbations, and gradients.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix used for Hessians and their running averages.
pub type Matrix = nalgebra::DMatrix<f64>;
