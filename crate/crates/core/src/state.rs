//! Points of `R^d` under the maximum norm.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit roundoff of IEEE double precision, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Maximum norm of a raw slice.
///
/// Fails with [`Error::NonFiniteValue`] if any component is NaN or infinite.
pub fn norm_max(v: &[f64]) -> Result<f64> {
    v.iter().try_fold(0.0_f64, |acc, &x| {
        if x.is_finite() {
            Ok(acc.max(x.abs()))
        } else {
            Err(Error::NonFiniteValue)
        }
    })
}

/// A finite, fixed-length state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument(
                "state vector must have d >= 1".into(),
            ));
        }
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(Self(components))
    }

    pub fn from_slice(components: &[f64]) -> Result<Self> {
        Self::new(components.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Maximum norm; infallible because the components are finite.
    pub fn norm(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    /// `max_k |self_k - other_k|`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl Index<usize> for StateVector {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl AsRef<[f64]> for StateVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for StateVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<StateVector> for Vec<f64> {
    fn from(v: StateVector) -> Vec<f64> {
        v.0
    }
}
