//! Gain sequences `a_k`, `c_k`, `w_k`.
//!
//! * step size `a_k = a / (k + 1 + A)^alpha`
//! * differencing magnitude `c_k = c / (k + 1)^gamma`
//! * Hessian smoothing weight `w_k`, harmonic `1 / (k + 1)` or polynomial
//!   `w0 / (k + 1)^omega`.
//!
//! The stability offset `A` shifts only the step size. Polynomial weights
//! must decay fast enough relative to `c_k` that `sum_k (w_k / c_k^2)^2`
//! converges, which for power laws is `2 omega - 4 gamma > 1`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightSchedule {
    /// `w_k = 1 / (k + 1)`: `H̄_k` is the running mean of all estimates.
    Harmonic,
    /// `w_k = w0 / (k + 1)^omega`.
    Polynomial { w0: f64, omega: f64 },
    /// `w_k = 0`: the Hessian average never moves from its initial value.
    /// Only meant for diagnostics; it violates the convergence conditions.
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainSchedule {
    a: f64,
    stability: f64,
    alpha: f64,
    c: f64,
    gamma: f64,
    weights: WeightSchedule,
}

/// The three gains at one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains {
    pub a: f64,
    pub c: f64,
    pub w: f64,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

impl GainSchedule {
    pub fn new(
        a: f64,
        stability: f64,
        alpha: f64,
        c: f64,
        gamma: f64,
        weights: WeightSchedule,
    ) -> Result<Self> {
        positive("a", a)?;
        positive("c", c)?;
        positive("gamma", gamma)?;
        if !(stability.is_finite() && stability >= 0.0) {
            return Err(Error::invalid(format!(
                "stability offset A must be nonnegative, got {stability}"
            )));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if let WeightSchedule::Polynomial { w0, omega } = weights {
            if !(w0 > 0.0 && w0 <= 1.0) {
                return Err(Error::invalid(format!("w0 must lie in (0, 1], got {w0}")));
            }
            if !omega.is_finite() || 2.0 * omega - 4.0 * gamma <= 1.0 {
                return Err(Error::invalid(format!(
                    "polynomial weights need 2*omega - 4*gamma > 1 \
                     (omega = {omega}, gamma = {gamma})"
                )));
            }
        }
        Ok(Self {
            a,
            stability,
            alpha,
            c,
            gamma,
            weights,
        })
    }

    /// The first-order SPSA defaults: `alpha = 0.602`, `gamma = 0.101`,
    /// `A` a tenth of the iteration budget, harmonic weights.
    pub fn spsa_defaults(iterations: usize) -> Self {
        Self::new(
            1.0,
            0.1 * iterations as f64,
            0.602,
            1.0,
            0.101,
            WeightSchedule::Harmonic,
        )
        .expect("default schedule is valid")
    }

    pub fn at(&self, k: usize) -> Gains {
        let k1 = k as f64 + 1.0;
        let w = match self.weights {
            WeightSchedule::Harmonic => 1.0 / k1,
            WeightSchedule::Polynomial { w0, omega } => w0 / k1.powf(omega),
            WeightSchedule::Frozen => 0.0,
        };
        Gains {
            a: self.a / (k1 + self.stability).powf(self.alpha),
            c: self.c / k1.powf(self.gamma),
            w,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn stability(&self) -> f64 {
        self.stability
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weights(&self) -> WeightSchedule {
        self.weights
    }

    /// Same schedule with a different Hessian weighting.
    pub fn with_weights(self, weights: WeightSchedule) -> Result<Self> {
        Self::new(
            self.a,
            self.stability,
            self.alpha,
            self.c,
            self.gamma,
            weights,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_iteration_values() {
        let s = GainSchedule::new(1.0, 1000.0, 0.602, 1.0, 0.101, WeightSchedule::Harmonic).unwrap();
        let g = s.at(0);
        assert_eq!(g.a, 1001f64.powf(-0.602));
        assert_eq!(g.c, 1.0);
        assert_eq!(g.w, 1.0);

        let s = GainSchedule::new(1.0, 0.0, 1.0, 1.0, 1.0 / 6.0, WeightSchedule::Harmonic).unwrap();
        assert_eq!(s.at(0), Gains { a: 1.0, c: 1.0, w: 1.0 });
    }

    #[test]
    fn spsa_defaults_match_benchmark_setup() {
        let s = GainSchedule::spsa_defaults(10_000);
        assert_eq!(s.stability(), 1000.0);
        let g = s.at(0);
        assert_eq!(g.c, 1.0);
        assert_eq!(g.a, 1001f64.powf(-0.602));
        assert!((s.at(9).c - 10f64.powf(-0.101)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let h = WeightSchedule::Harmonic;
        assert!(GainSchedule::new(0.0, 0.0, 1.0, 1.0, 0.1, h).is_err());
        assert!(GainSchedule::new(1.0, -1.0, 1.0, 1.0, 0.1, h).is_err());
        assert!(GainSchedule::new(1.0, 0.0, 1.5, 1.0, 0.1, h).is_err());
        assert!(GainSchedule::new(1.0, 0.0, 0.0, 1.0, 0.1, h).is_err());
        assert!(GainSchedule::new(1.0, 0.0, 1.0, -1.0, 0.1, h).is_err());
        // 2 * 0.7 - 4 * 0.101 = 0.996 <= 1
        let poly = WeightSchedule::Polynomial { w0: 1.0, omega: 0.7 };
        assert!(GainSchedule::new(1.0, 0.0, 1.0, 1.0, 0.101, poly).is_err());
        let poly = WeightSchedule::Polynomial { w0: 1.0, omega: 0.75 };
        assert!(GainSchedule::new(1.0, 0.0, 1.0, 1.0, 0.101, poly).is_ok());
        let poly = WeightSchedule::Polynomial { w0: 1.5, omega: 1.0 };
        assert!(GainSchedule::new(1.0, 0.0, 1.0, 1.0, 0.1, poly).is_err());
    }

    proptest! {
        #[test]
        fn gains_monotone(
            a in 0.01f64..10.0,
            big_a in 0.0f64..100.0,
            alpha in 0.05f64..=1.0,
            c in 0.01f64..10.0,
            gamma in 0.01f64..0.3,
            omega_extra in 0.01f64..2.0,
            k in 0usize..100_000,
        ) {
            let omega = (1.0 + 4.0 * gamma) / 2.0 + omega_extra;
            for weights in [WeightSchedule::Harmonic, WeightSchedule::Polynomial { w0: 1.0, omega }] {
                let s = GainSchedule::new(a, big_a, alpha, c, gamma, weights).unwrap();
                let (g0, g1) = (s.at(k), s.at(k + 1));
                prop_assert!(g0.a > 0.0 && g0.c > 0.0 && g0.w > 0.0);
                prop_assert!(g1.a < g0.a);
                prop_assert!(g1.c < g0.c);
                prop_assert!(g1.w <= g0.w);
                prop_assert!(s.at(0).w <= 1.0);
            }
        }
    }
}
