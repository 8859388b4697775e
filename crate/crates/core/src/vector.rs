use std::ops::Deref;

use crate::error::{Error, Result};
use crate::Vector;

/// A finite, nonempty parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector(Vector);

impl ParameterVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::from_dvector(Vector::from_vec(entries))
    }

    pub fn from_dvector(v: Vector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::invalid("parameter vector must have dimension >= 1"));
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("entry {i} is not finite")));
        }
        Ok(Self(v))
    }

    pub(crate) fn from_dvector_unchecked(v: Vector) -> Self {
        debug_assert!(!v.is_empty());
        Self(v)
    }

    pub fn zeros(p: usize) -> Result<Self> {
        Self::from_dvector(Vector::zeros(p))
    }

    pub fn from_element(p: usize, value: f64) -> Result<Self> {
        Self::from_dvector(Vector::from_element(p, value))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &Vector {
        &self.0
    }

    pub fn into_dvector(self) -> Vector {
        self.0
    }
}

impl Deref for ParameterVector {
    type Target = Vector;

    fn deref(&self) -> &Vector {
        &self.0
    }
}

impl From<ParameterVector> for Vector {
    fn from(v: ParameterVector) -> Self {
        v.0
    }
}
