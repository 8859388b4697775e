use rand::seq::index;

use super::libsvm::LabeledData;
use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::rng::RandomStream;
use crate::{Matrix, Vector};

/// Corr-entropy induced classification loss
///
/// ```text
/// f(theta) = (1/I) sum_i (kappa^2 / 2) (1 - exp(-(y_i - x_i^T theta)^2 / kappa^2))
/// ```
///
/// observed through mini-batches of `J` distinct samples drawn uniformly.
#[derive(Clone, Debug)]
pub struct CorrEntropyProblem {
    features: Matrix,
    labels: Vector,
    kappa: f64,
    batch: usize,
}

impl CorrEntropyProblem {
    pub fn new(data: &LabeledData, kappa: f64, batch: usize) -> Result<Self> {
        if data.is_empty() || data.dim == 0 {
            return Err(Error::invalid("classification data must be nonempty"));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
        }
        if batch == 0 || batch > data.len() {
            return Err(Error::invalid(format!(
                "batch size must lie in 1..={}, got {batch}",
                data.len()
            )));
        }
        if let Some(s) = data.samples.iter().find(|s| s.label != 1.0 && s.label != -1.0) {
            return Err(Error::invalid(format!("label {} is not +1/-1", s.label)));
        }
        Ok(Self {
            features: data.dense_features(),
            labels: data.labels(),
            kappa,
            batch,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    fn residual(&self, i: usize, theta: &Vector) -> f64 {
        self.labels[i] - self.features.row(i).transpose().dot(theta)
    }

    fn term(&self, r: f64) -> f64 {
        let k2 = self.kappa * self.kappa;
        0.5 * k2 * (1.0 - (-r * r / k2).exp())
    }

    pub fn full_loss(&self, theta: &Vector) -> f64 {
        let total: f64 = (0..self.n_samples())
            .map(|i| self.term(self.residual(i, theta)))
            .sum();
        total / self.n_samples() as f64
    }

    /// Mean loss over the given sample indices, summed in the order given.
    pub fn batch_loss(&self, theta: &Vector, indices: &[usize]) -> f64 {
        let total: f64 = indices
            .iter()
            .map(|&i| self.term(self.residual(i, theta)))
            .sum();
        total / indices.len() as f64
    }

    /// `J` distinct indices in increasing order.
    pub fn draw_batch(&self, stream: &mut RandomStream) -> Vec<usize> {
        let mut idx = index::sample(stream, self.n_samples(), self.batch).into_vec();
        idx.sort_unstable();
        idx
    }

    pub fn gradient(&self, theta: &Vector) -> Vector {
        let k2 = self.kappa * self.kappa;
        let mut g = Vector::zeros(theta.len());
        for i in 0..self.n_samples() {
            let r = self.residual(i, theta);
            let coef = -r * (-r * r / k2).exp();
            g += self.features.row(i).transpose() * coef;
        }
        g / self.n_samples() as f64
    }

    pub fn hessian(&self, theta: &Vector) -> Matrix {
        let k2 = self.kappa * self.kappa;
        let d = theta.len();
        let mut h = Matrix::zeros(d, d);
        for i in 0..self.n_samples() {
            let r = self.residual(i, theta);
            let coef = (-r * r / k2).exp() * (1.0 - 2.0 * r * r / k2);
            let x = self.features.row(i).transpose();
            h += &x * x.transpose() * coef;
        }
        h / self.n_samples() as f64
    }
}

impl Objective for CorrEntropyProblem {
    fn dim(&self) -> usize {
        self.features.ncols()
    }

    fn value(&self, theta: &Vector) -> f64 {
        self.full_loss(theta)
    }

    fn observe(&self, theta: &Vector, noise: &mut RandomStream) -> f64 {
        let batch = self.draw_batch(noise);
        self.batch_loss(theta, &batch)
    }

    /// Zero is attained only when every residual vanishes; it is the value
    /// used to normalize progress.
    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }
}
