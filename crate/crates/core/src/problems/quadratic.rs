use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::pdmap::symmetric_lambda_min;
use crate::rng::RandomStream;
use crate::{Matrix, Vector};

/// `f(theta) = theta^T H theta / 2` observed with additive `N(0, sigma^2)`
/// noise. Minimizer at the origin.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    h: Matrix,
    noise_sigma2: f64,
}

impl QuadraticProblem {
    pub fn new(h: Matrix, noise_sigma2: f64) -> Result<Self> {
        if !h.is_square() || h.nrows() == 0 {
            return Err(Error::invalid("Hessian must be a nonempty square matrix"));
        }
        if (&h - h.transpose()).amax() > 0.0 {
            return Err(Error::invalid("Hessian must be symmetric"));
        }
        if symmetric_lambda_min(&h) <= 0.0 {
            return Err(Error::invalid("Hessian must be positive definite"));
        }
        if !(noise_sigma2.is_finite() && noise_sigma2 >= 0.0) {
            return Err(Error::invalid(format!(
                "noise variance must be nonnegative, got {noise_sigma2}"
            )));
        }
        Ok(Self { h, noise_sigma2 })
    }

    pub fn diagonal(diag: &[f64], noise_sigma2: f64) -> Result<Self> {
        Self::new(
            Matrix::from_diagonal(&Vector::from_column_slice(diag)),
            noise_sigma2,
        )
    }

    pub fn hessian(&self) -> &Matrix {
        &self.h
    }

    pub fn noise_sigma2(&self) -> f64 {
        self.noise_sigma2
    }

    pub fn optimum(&self) -> Vector {
        Vector::zeros(self.h.nrows())
    }

    pub fn gradient(&self, theta: &Vector) -> Vector {
        &self.h * theta
    }
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn value(&self, theta: &Vector) -> f64 {
        0.5 * theta.dot(&(&self.h * theta))
    }

    fn observe(&self, theta: &Vector, noise: &mut RandomStream) -> f64 {
        let f = self.value(theta);
        if self.noise_sigma2 == 0.0 {
            f
        } else {
            f + self.noise_sigma2.sqrt() * noise.standard_normal()
        }
    }

    fn optimal_value(&self) -> Option<f64> {
        Some(0.0)
    }
}
