//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha20 generator keyed by a 64-bit seed and positioned
//! on one of its 2^64 independent stream ids. Two streams with the same
//! `(seed, substream)` emit identical variates; different substreams never
//! overlap. Solvers and harnesses derive one substream per (replicate,
//! purpose) pair so that, for example, drawing extra diagnostic noise never
//! shifts the perturbations an optimizer sees.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::vector::ParameterVector;
use crate::Vector;

/// What a derived substream is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum StreamPurpose {
    /// Perturbation directions drawn by the solver.
    Perturbation = 1,
    /// Observation noise of the main oracle channel.
    Noise = 2,
    /// Observation noise of the auxiliary channel (blocking checks).
    AuxNoise = 3,
    /// Random initial iterates.
    Init = 4,
    /// Dataset generation.
    Data = 5,
    /// Free for tests and Monte Carlo studies.
    Study = 6,
}

#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    substream: u64,
    rng: ChaCha20Rng,
}

impl RandomStream {
    pub fn new(seed: u64, substream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(substream);
        Self {
            seed,
            substream,
            rng,
        }
    }

    /// Substream for `purpose` within `replicate`.
    pub fn for_replicate(seed: u64, replicate: u64, purpose: StreamPurpose) -> Self {
        Self::new(seed, (replicate << 8) | purpose as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream(&self) -> u64 {
        self.substream
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.rng.random::<f64>()
    }

    pub fn rademacher(&mut self) -> f64 {
        if self.rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    /// `p` i.i.d. N(0, 1) variates.
    pub fn standard_normal_vector(&mut self, p: usize) -> ParameterVector {
        assert!(p >= 1, "dimension must be positive");
        ParameterVector::from_dvector_unchecked(Vector::from_fn(p, |_, _| self.standard_normal()))
    }

    /// `p` i.i.d. symmetric Bernoulli (+1/-1) variates.
    pub fn rademacher_vector(&mut self, p: usize) -> ParameterVector {
        assert!(p >= 1, "dimension must be positive");
        ParameterVector::from_dvector_unchecked(Vector::from_fn(p, |_, _| self.rademacher()))
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
