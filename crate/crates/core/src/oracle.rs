//! Query-counting zeroth-order oracles.
//!
//! Solvers see a loss only through [`NoisyOracle`]: a noisy value per call,
//! with every call counted. Benchmark losses implement [`Objective`] and are
//! wrapped in an [`ObjectiveOracle`], which owns the noise streams and the
//! query ledger.

use crate::rng::RandomStream;
use crate::Vector;

pub trait NoisyOracle {
    fn dim(&self) -> usize;

    /// One noisy observation `y(theta, omega)` with fresh noise.
    fn query(&mut self, theta: &Vector) -> f64;

    /// One noisy observation drawn from a noise channel separate from
    /// [`query`](Self::query), so auxiliary checks leave the main noise
    /// sequence untouched. Counted in the same ledger.
    fn query_aux(&mut self, theta: &Vector) -> f64 {
        self.query(theta)
    }

    fn query_count(&self) -> u64;

    /// Noise-free loss used for reporting only; never counted as a query.
    /// `NaN` when the oracle has no access to it.
    fn loss_metric(&self, _theta: &Vector) -> f64 {
        f64::NAN
    }
}

impl<O: NoisyOracle + ?Sized> NoisyOracle for &mut O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn query(&mut self, theta: &Vector) -> f64 {
        (**self).query(theta)
    }

    fn query_aux(&mut self, theta: &Vector) -> f64 {
        (**self).query_aux(theta)
    }

    fn query_count(&self) -> u64 {
        (**self).query_count()
    }

    fn loss_metric(&self, theta: &Vector) -> f64 {
        (**self).loss_metric(theta)
    }
}

/// A loss with a deterministic part and a noisy observation model.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    /// Deterministic loss `f(theta)`.
    fn value(&self, theta: &Vector) -> f64;

    /// One observation `y(theta, omega)` using `noise` as the source of
    /// randomness.
    fn observe(&self, theta: &Vector, noise: &mut RandomStream) -> f64;

    /// `f(theta*)` when known.
    fn optimal_value(&self) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn value(&self, theta: &Vector) -> f64 {
        (**self).value(theta)
    }

    fn observe(&self, theta: &Vector, noise: &mut RandomStream) -> f64 {
        (**self).observe(theta, noise)
    }

    fn optimal_value(&self) -> Option<f64> {
        (**self).optimal_value()
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn value(&self, theta: &Vector) -> f64 {
        (**self).value(theta)
    }

    fn observe(&self, theta: &Vector, noise: &mut RandomStream) -> f64 {
        (**self).observe(theta, noise)
    }

    fn optimal_value(&self) -> Option<f64> {
        (**self).optimal_value()
    }
}

/// Oracle over an [`Objective`] with its own seeded noise streams.
#[derive(Clone, Debug)]
pub struct ObjectiveOracle<O> {
    objective: O,
    noise: RandomStream,
    aux_noise: RandomStream,
    queries: u64,
}

impl<O: Objective> ObjectiveOracle<O> {
    pub fn new(objective: O, noise: RandomStream, aux_noise: RandomStream) -> Self {
        Self {
            objective,
            noise,
            aux_noise,
            queries: 0,
        }
    }

    /// Both channels derived from a single seed.
    pub fn seeded(objective: O, seed: u64) -> Self {
        Self::new(
            objective,
            RandomStream::new(seed, 0),
            RandomStream::new(seed, 1),
        )
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }
}

impl<O: Objective> NoisyOracle for ObjectiveOracle<O> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn query(&mut self, theta: &Vector) -> f64 {
        self.queries += 1;
        self.objective.observe(theta, &mut self.noise)
    }

    fn query_aux(&mut self, theta: &Vector) -> f64 {
        self.queries += 1;
        self.objective.observe(theta, &mut self.aux_noise)
    }

    fn query_count(&self) -> u64 {
        self.queries
    }

    fn loss_metric(&self, theta: &Vector) -> f64 {
        self.objective.value(theta)
    }
}

/// Noise-free oracle around a closure. Mostly for tests and exact checks.
pub struct FnOracle<F> {
    f: F,
    dim: usize,
    queries: u64,
}

impl<F: FnMut(&Vector) -> f64> FnOracle<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { f, dim, queries: 0 }
    }
}

impl<F: FnMut(&Vector) -> f64> NoisyOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn query(&mut self, theta: &Vector) -> f64 {
        self.queries += 1;
        (self.f)(theta)
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}
