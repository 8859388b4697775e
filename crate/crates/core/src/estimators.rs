//! Stein-identity gradient and Hessian estimators.
//!
//! With `u ~ N(0, I)` and the Gaussian-smoothed loss
//! `f_c(theta) = E_u f(theta + c u)`, the first- and second-order Stein
//! identities give
//!
//! ```text
//! grad f_c(theta) = E[ f(theta + c u) u ] / c
//! hess f_c(theta) = E[ f(theta + c u) (u u^T - I) ] / c^2
//! ```
//!
//! and subtracting mean-zero control terms (`f(theta)` or `f(theta - c u)`)
//! yields the lower-variance variants below. All Hessian estimates are a
//! scalar times `u u^T - I`, so they are symmetric by construction.

use crate::error::{Error, Result};
use crate::oracle::NoisyOracle;
use crate::rng::RandomStream;
use crate::{Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GradientEstimator {
    /// `y(theta + c u) u / c`
    OnePoint,
    /// `(y(theta + c u) - y(theta)) u / c`
    TwoPointForward,
    /// `(y(theta + c u) - y(theta - c u)) u / (2c)`
    TwoPointCentral,
}

impl GradientEstimator {
    pub fn queries(self) -> u64 {
        match self {
            GradientEstimator::OnePoint => 1,
            GradientEstimator::TwoPointForward | GradientEstimator::TwoPointCentral => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HessianEstimator {
    /// `y+ (u u^T - I) / c^2`
    OnePoint,
    /// `(y+ - y) (u u^T - I) / c^2`
    TwoForward,
    /// `(y+ + y-) (u u^T - I) / (2 c^2)`
    TwoCentral,
    /// `(y+ + y- - 2 y) (u u^T - I) / (2 c^2)`
    ThreePoint,
}

impl HessianEstimator {
    pub fn queries(self) -> u64 {
        match self {
            HessianEstimator::OnePoint => 1,
            HessianEstimator::TwoForward | HessianEstimator::TwoCentral => 2,
            HessianEstimator::ThreePoint => 3,
        }
    }
}

/// One gradient estimate and one Hessian estimate with the queries spent.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateBundle {
    pub gradient: Vector,
    pub hessian: Matrix,
    pub queries_used: u64,
}

/// Queries issued by [`estimate_bundle_shared`].
pub const SHARED_BUNDLE_QUERIES: u64 = 3;

fn check_inputs<O: NoisyOracle + ?Sized>(
    oracle: &O,
    theta: &Vector,
    c: f64,
    u: &Vector,
) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid(format!(
            "differencing magnitude must be positive, got {c}"
        )));
    }
    let p = oracle.dim();
    if theta.len() != p || u.len() != p {
        return Err(Error::invalid(format!(
            "dimension mismatch: oracle {p}, theta {}, perturbation {}",
            theta.len(),
            u.len()
        )));
    }
    Ok(())
}

/// `s (u u^T - I)`, built entrywise so that the result is exactly symmetric.
pub fn rank_one_minus_identity(s: f64, u: &Vector) -> Matrix {
    let p = u.len();
    Matrix::from_fn(p, p, |i, j| {
        let uu = u[i] * u[j];
        if i == j {
            s * (uu - 1.0)
        } else {
            s * uu
        }
    })
}

pub fn estimate_gradient<O: NoisyOracle + ?Sized>(
    kind: GradientEstimator,
    oracle: &mut O,
    theta: &Vector,
    c: f64,
    u: &Vector,
) -> Result<Vector> {
    check_inputs(oracle, theta, c, u)?;
    let scale = match kind {
        GradientEstimator::OnePoint => oracle.query(&(theta + c * u)) / c,
        GradientEstimator::TwoPointForward => {
            let plus = oracle.query(&(theta + c * u));
            let center = oracle.query(theta);
            (plus - center) / c
        }
        GradientEstimator::TwoPointCentral => {
            let plus = oracle.query(&(theta + c * u));
            let minus = oracle.query(&(theta - c * u));
            (plus - minus) / (2.0 * c)
        }
    };
    Ok(u * scale)
}

pub fn estimate_hessian<O: NoisyOracle + ?Sized>(
    kind: HessianEstimator,
    oracle: &mut O,
    theta: &Vector,
    c: f64,
    u: &Vector,
) -> Result<Matrix> {
    check_inputs(oracle, theta, c, u)?;
    let c2 = c * c;
    let s = match kind {
        HessianEstimator::OnePoint => oracle.query(&(theta + c * u)) / c2,
        HessianEstimator::TwoForward => {
            let plus = oracle.query(&(theta + c * u));
            let center = oracle.query(theta);
            (plus - center) / c2
        }
        HessianEstimator::TwoCentral => {
            let plus = oracle.query(&(theta + c * u));
            let minus = oracle.query(&(theta - c * u));
            (plus + minus) / (2.0 * c2)
        }
        HessianEstimator::ThreePoint => {
            let plus = oracle.query(&(theta + c * u));
            let minus = oracle.query(&(theta - c * u));
            let center = oracle.query(theta);
            (plus + minus - 2.0 * center) / (2.0 * c2)
        }
    };
    Ok(rank_one_minus_identity(s, u))
}

/// Central gradient and three-point Hessian from one shared triple of
/// queries `y(theta + c u)`, `y(theta - c u)`, `y(theta)`.
pub fn estimate_bundle_shared<O: NoisyOracle + ?Sized>(
    oracle: &mut O,
    theta: &Vector,
    c: f64,
    u: &Vector,
) -> Result<EstimateBundle> {
    check_inputs(oracle, theta, c, u)?;
    let plus = oracle.query(&(theta + c * u));
    let minus = oracle.query(&(theta - c * u));
    let center = oracle.query(theta);
    Ok(EstimateBundle {
        gradient: u * ((plus - minus) / (2.0 * c)),
        hessian: rank_one_minus_identity((plus + minus - 2.0 * center) / (2.0 * c * c), u),
        queries_used: SHARED_BUNDLE_QUERIES,
    })
}

/// Arithmetic mean of gradients and of Hessians; query costs add up.
pub fn average_bundles(bundles: &[EstimateBundle]) -> Result<EstimateBundle> {
    let first = bundles
        .first()
        .ok_or_else(|| Error::invalid("cannot average an empty list of estimates"))?;
    if bundles.len() == 1 {
        return Ok(first.clone());
    }
    let p = first.gradient.len();
    let mut gradient = Vector::zeros(p);
    let mut hessian = Matrix::zeros(p, p);
    let mut queries_used = 0;
    for b in bundles {
        if b.gradient.len() != p || b.hessian.shape() != (p, p) {
            return Err(Error::invalid("estimates have inconsistent dimensions"));
        }
        gradient += &b.gradient;
        hessian += &b.hessian;
        queries_used += b.queries_used;
    }
    let m = bundles.len() as f64;
    gradient /= m;
    hessian /= m;
    Ok(EstimateBundle {
        gradient,
        hessian,
        queries_used,
    })
}

/// Monte Carlo estimate of the smoothed loss `E_u f(theta + c u)` for a
/// deterministic `f`. Intended as a test oracle.
pub fn smoothed_loss_mc<F: Fn(&Vector) -> f64>(
    f: F,
    theta: &Vector,
    c: f64,
    n_samples: usize,
    stream: &mut RandomStream,
) -> f64 {
    assert!(n_samples >= 1, "need at least one sample");
    let p = theta.len();
    let mut total = 0.0;
    for _ in 0..n_samples {
        let u = stream.standard_normal_vector(p);
        total += f(&(theta + c * &*u));
    }
    total / n_samples as f64
}
