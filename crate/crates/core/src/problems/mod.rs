//! Benchmark losses and their data sources.
//!
//! Every problem exposes a noisy observation model through
//! [`Objective`](crate::oracle::Objective) plus analytic derivatives, which
//! the solvers never touch but the test oracles rely on.

mod correntropy;
mod libsvm;
mod quadratic;
mod skewed_quartic;
mod synthetic;

pub use correntropy::CorrEntropyProblem;
pub use libsvm::{load_libsvm, parse_libsvm, write_libsvm, LabeledData, Sample};
pub use quadratic::QuadraticProblem;
pub use skewed_quartic::SkewedQuartic;
pub use synthetic::{generate_synthetic_classification, synthetic_direction};

/// Noise variance of the skewed-quartic benchmark.
pub const SKEWED_QUARTIC_NOISE_VARIANCE: f64 = 0.1;
/// Corr-entropy penalty used in the classification benchmark.
pub const DEFAULT_KAPPA: f64 = 10.0;
/// Mini-batch size used in the classification benchmark.
pub const DEFAULT_BATCH: usize = 10;
