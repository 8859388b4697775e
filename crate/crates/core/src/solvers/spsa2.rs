use crate::error::{Error, Result};
use crate::estimators::EstimateBundle;
use crate::oracle::NoisyOracle;
use crate::{Matrix, Vector};

pub(crate) const BUNDLE_QUERIES: u64 = 4;

/// Magnitude `c̃_k = c / (k + 1)^gamma` of the second 2SPSA perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondPerturbation {
    pub c: f64,
    pub gamma: f64,
}

impl SecondPerturbation {
    pub fn at(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.c.is_finite() && self.c > 0.0 && self.gamma.is_finite() && self.gamma > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid second perturbation {self:?}")))
        }
    }
}

/// One 2SPSA bundle from four queries
///
/// ```text
/// y±   = y(theta ± c Δ)
/// y±,+ = y(theta ± c Δ + c̃ Δ̃)
/// Ĥ    = sym( (y++ - y-+ + y- - y+) / (2 c c̃) · Δ̃^{-1} Δ^{-T} )
/// ĝ    = (y+ - y-) / (2c) · Δ^{-1}
/// ```
///
/// with componentwise inverses.
pub fn estimate_2spsa_bundle<O: NoisyOracle + ?Sized>(
    oracle: &mut O,
    theta: &Vector,
    c: f64,
    c_tilde: f64,
    delta: &Vector,
    delta_tilde: &Vector,
) -> Result<EstimateBundle> {
    let p = oracle.dim();
    if theta.len() != p || delta.len() != p || delta_tilde.len() != p {
        return Err(Error::invalid("dimension mismatch in 2SPSA estimate"));
    }
    if !(c > 0.0 && c_tilde > 0.0) {
        return Err(Error::invalid("2SPSA perturbation magnitudes must be positive"));
    }
    let plus_point = theta + delta * c;
    let minus_point = theta - delta * c;
    let shift = delta_tilde * c_tilde;
    let plus = oracle.query(&plus_point);
    let minus = oracle.query(&minus_point);
    let plus_plus = oracle.query(&(&plus_point + &shift));
    let minus_plus = oracle.query(&(&minus_point + &shift));

    let inv = delta.map(|d| 1.0 / d);
    let inv_tilde = delta_tilde.map(|d| 1.0 / d);
    let s = (plus_plus - minus_plus + minus - plus) / (2.0 * c * c_tilde);
    let raw = Matrix::from_fn(p, p, |i, j| s * inv_tilde[i] * inv[j]);
    let hessian = Matrix::from_fn(p, p, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    Ok(EstimateBundle {
        gradient: inv * ((plus - minus) / (2.0 * c)),
        hessian,
        queries_used: BUNDLE_QUERIES,
    })
}
