use crate::error::{Error, Result};
use crate::oracle::Objective;
use crate::rng::RandomStream;
use crate::{Matrix, Vector};

/// `f(theta) = sum_i h((A theta)_i)` with `h(v) = v^2 + 0.1 v^3 + 0.01 v^4`,
/// where `p A` is the upper-triangular all-ones matrix. The minimizer is
/// `theta* = 0` with `f(theta*) = 0`.
#[derive(Clone, Debug)]
pub struct SkewedQuartic {
    a: Matrix,
    noise_sigma2: f64,
}

impl SkewedQuartic {
    pub fn new(p: usize, noise_sigma2: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(noise_sigma2.is_finite() && noise_sigma2 >= 0.0) {
            return Err(Error::invalid(format!(
                "noise variance must be nonnegative, got {noise_sigma2}"
            )));
        }
        let inv = 1.0 / p as f64;
        let a = Matrix::from_fn(p, p, |i, j| if j >= i { inv } else { 0.0 });
        Ok(Self { a, noise_sigma2 })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn a_matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn noise_sigma2(&self) -> f64 {
        self.noise_sigma2
    }

    fn transformed(&self, theta: &Vector) -> Vector {
        &self.a * theta
    }

    pub fn value(&self, theta: &Vector) -> f64 {
        self.transformed(theta)
            .iter()
            .map(|&v| {
                let v2 = v * v;
                v2 + 0.1 * v2 * v + 0.01 * v2 * v2
            })
            .sum()
    }

    pub fn gradient(&self, theta: &Vector) -> Vector {
        let v = self.transformed(theta);
        let outer = v.map(|v| 2.0 * v + 0.3 * v * v + 0.04 * v * v * v);
        self.a.tr_mul(&outer)
    }

    pub fn hessian(&self, theta: &Vector) -> Matrix {
        let v = self.transformed(theta);
        let curv = v.map(|v| 2.0 + 0.6 * v + 0.12 * v * v);
        let scaled = Matrix::from_fn(self.dim(), self.dim(), |i, j| curv[i] * self.a[(i, j)]);
        let h = self.a.tr_mul(&scaled);
        (&h + h.transpose()) * 0.5
    }

    /// Third derivative tensor contracted with `u` three times:
    /// `f'''(theta)[u, u, u]`.
    pub fn third_derivative_cubed(&self, theta: &Vector, u: &Vector) -> f64 {
        let v = self.transformed(theta);
        let au = &self.a * u;
        v.iter()
            .zip(au.iter())
            .map(|(&v, &w)| (0.6 + 0.24 * v) * w * w * w)
            .sum()
    }

    /// `f''''[u, u, u, u]`; the fourth derivative is constant.
    pub fn fourth_derivative_quartic(&self, u: &Vector) -> f64 {
        (&self.a * u).iter().map(|w| 0.24 * w.powi(4)).sum()
    }

    /// `E_u[ f'''(theta)[u, u, u] u ]` for `u ~ N(0, I)`, in closed form
    /// via Isserlis' theorem: three times the trace-contraction of the
    /// third-derivative tensor.
    pub fn third_derivative_gaussian_moment(&self, theta: &Vector) -> Vector {
        let v = self.transformed(theta);
        let p = self.dim();
        let row_sq = Vector::from_fn(p, |m, _| self.a.row(m).norm_squared());
        let weights = Vector::from_fn(p, |m, _| 3.0 * (0.6 + 0.24 * v[m]) * row_sq[m]);
        self.a.tr_mul(&weights)
    }
}

impl Objective for SkewedQuartic {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn value(&self, theta: &Vector) -> f64 {
        SkewedQuartic::value(self, theta)
    }

    fn observe(&self, theta: &Vector, noise: &mut RandomStream) -> f64 {
        let f = SkewedQuartic::value(self, theta);
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
