//! Positive-definite mappings for the averaged Hessian.
//!
//! The running Hessian average can be indefinite, especially early on, so it
//! is mapped onto the symmetric positive-definite cone before the Newton
//! solve. All mappings work from one symmetric eigendecomposition.

use nalgebra::{Cholesky, SymmetricEigen};

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Eigenvalue floor `absolute + relative * ||H||_2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaFloor {
    pub absolute: f64,
    pub relative: f64,
}

impl DeltaFloor {
    pub fn absolute(value: f64) -> Self {
        Self {
            absolute: value,
            relative: 0.0,
        }
    }

    /// `1e-8 * (1 + ||H||_2)`.
    pub fn tiny() -> Self {
        Self {
            absolute: 1e-8,
            relative: 1e-8,
        }
    }

    pub fn resolve(&self, spectral_norm: f64) -> f64 {
        self.absolute + self.relative * spectral_norm
    }

    fn validate(&self) -> Result<()> {
        let ok = self.absolute.is_finite()
            && self.relative.is_finite()
            && self.absolute >= 0.0
            && self.relative >= 0.0
            && (self.absolute > 0.0 || self.relative > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("eigenvalue floor must be positive: {self:?}")))
        }
    }
}

/// `eps_k = scale / (k + 1)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonSchedule {
    pub scale: f64,
    pub exponent: f64,
}

impl EpsilonSchedule {
    pub fn at(&self, k: usize) -> f64 {
        self.scale / (k as f64 + 1.0).powf(self.exponent)
    }

    /// Fixed `eps`, for exact checks.
    pub fn constant(eps: f64) -> Self {
        Self {
            scale: eps,
            exponent: 0.0,
        }
    }
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self {
            scale: 1.0,
            exponent: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PdMap {
    /// `H + eps I` with the smallest `eps >= 0` lifting `lambda_min` to the floor.
    DampShift { floor: DeltaFloor },
    /// `Q max(Lambda, floor) Q^T`.
    EigenClamp { floor: DeltaFloor },
    /// Principal square root of `H^T H + eps_k I`.
    SqrtMap { epsilon: EpsilonSchedule },
}

impl Default for PdMap {
    fn default() -> Self {
        PdMap::EigenClamp {
            floor: DeltaFloor::tiny(),
        }
    }
}

impl PdMap {
    /// Checks the floor or epsilon parameters without applying the map.
    pub fn validate(&self) -> Result<()> {
        match self {
            PdMap::DampShift { floor } | PdMap::EigenClamp { floor } => floor.validate(),
            PdMap::SqrtMap { epsilon } => {
                let ok = epsilon.scale.is_finite()
                    && epsilon.scale > 0.0
                    && epsilon.exponent.is_finite()
                    && epsilon.exponent >= 0.0;
                if ok {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("invalid sqrt-map schedule {epsilon:?}")))
                }
            }
        }
    }
}

/// Mapped matrix together with the smallest eigenvalue of the input.
#[derive(Clone, Debug)]
pub struct MappedHessian {
    pub matrix: Matrix,
    pub input_lambda_min: f64,
}

const SYMMETRY_TOL: f64 = 1e-10;

fn check_symmetric(h: &Matrix) -> Result<()> {
    if !h.is_square() || h.nrows() == 0 {
        return Err(Error::invalid(format!(
            "expected a nonempty square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.amax().max(1.0);
    let p = h.nrows();
    for i in 0..p {
        for j in 0..i {
            let (a, b) = (h[(i, j)], h[(j, i)]);
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Numerical("matrix has non-finite entries".into()));
            }
            if (a - b).abs() > SYMMETRY_TOL * scale {
                return Err(Error::invalid(format!(
                    "matrix is not symmetric: entry ({i},{j}) = {a} vs ({j},{i}) = {b}"
                )));
            }
        }
        if !h[(i, i)].is_finite() {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
    }
    Ok(())
}

fn symmetrize(m: Matrix) -> Matrix {
    (&m + m.transpose()) * 0.5
}

fn rebuild(eigen: &SymmetricEigen<f64, nalgebra::Dyn>, values: &Vector) -> Matrix {
    let q = &eigen.eigenvectors;
    symmetrize(q * Matrix::from_diagonal(values) * q.transpose())
}

fn lambda_min(values: &Vector) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Maps symmetric `h` onto the positive-definite cone at iteration `k`.
pub fn apply_pd_map(kind: &PdMap, h: &Matrix, k: usize) -> Result<Matrix> {
    apply_pd_map_with_spectrum(kind, h, k).map(|m| m.matrix)
}

/// As [`apply_pd_map`], also reporting `lambda_min(h)`.
pub fn apply_pd_map_with_spectrum(kind: &PdMap, h: &Matrix, k: usize) -> Result<MappedHessian> {
    check_symmetric(h)?;
    let eigen = h.clone().symmetric_eigen();
    let values = &eigen.eigenvalues;
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("eigendecomposition failed".into()));
    }
    let lmin = lambda_min(values);
    let norm = values.amax();
    let matrix = match *kind {
        PdMap::DampShift { floor } => {
            floor.validate()?;
            let eps = (floor.resolve(norm) - lmin).max(0.0);
            if eps == 0.0 {
                symmetrize(h.clone())
            } else {
                let mut out = symmetrize(h.clone());
                for i in 0..out.nrows() {
                    out[(i, i)] += eps;
                }
                out
            }
        }
        PdMap::EigenClamp { floor } => {
            floor.validate()?;
            let delta = floor.resolve(norm);
            if lmin >= delta {
                symmetrize(h.clone())
            } else {
                rebuild(&eigen, &values.map(|l| l.max(delta)))
            }
        }
        PdMap::SqrtMap { epsilon } => {
            let eps = epsilon.at(k);
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::invalid(format!("sqrt map needs eps_k > 0, got {eps}")));
            }
            rebuild(&eigen, &values.map(|l| (l * l + eps).sqrt()))
        }
    };
    Ok(MappedHessian {
        matrix,
        input_lambda_min: lmin,
    })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn symmetric_lambda_min(h: &Matrix) -> f64 {
    lambda_min(&h.clone().symmetric_eigenvalues())
}

/// Solves `hpd * d = g` by Cholesky factorization.
pub fn solve_preconditioned(hpd: &Matrix, g: &Vector) -> Result<Vector> {
    if hpd.nrows() != g.len() || !hpd.is_square() {
        return Err(Error::invalid(format!(
            "preconditioner is {}x{}, gradient has length {}",
            hpd.nrows(),
            hpd.ncols(),
            g.len()
        )));
    }
    let chol = Cholesky::new(hpd.clone()).ok_or_else(|| {
        Error::Numerical("Cholesky factorization failed; raise the eigenvalue floor".into())
    })?;
    let d = chol.solve(g);
    if d.iter().all(|x| x.is_finite()) {
        Ok(d)
    } else {
        Err(Error::Numerical("preconditioned solve produced non-finite values".into()))
    }
}
