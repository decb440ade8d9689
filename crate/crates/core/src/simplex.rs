//! Points of the probability simplex.

use crate::error::{Error, Result};
use crate::index::l1_distance;
use serde::{Deserialize, Serialize};

/// Tolerance on the coordinate sum of a simplex vector.
pub const MASS_TOL: f64 = 1e-12;

/// A probability vector: non-negative coordinates summing to 1 within
/// [`MASS_TOL`]. The index set (colours `0..d` or tuple states `0..d^m`) is
/// determined by the length and the context in which the vector is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexVector {
    coords: Vec<f64>,
}

impl SimplexVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::NotSimplex("empty coordinate vector".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::NotSimplex(format!(
                "coordinate {c} is negative or not finite"
            )));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::NotSimplex(format!(
                "coordinates sum to {sum}, not 1"
            )));
        }
        Ok(Self { coords })
    }

    /// Rescale an arbitrary non-negative vector to unit mass.
    pub fn normalized(coords: &[f64]) -> Result<Self> {
        let sum: f64 = coords.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::NotSimplex(format!(
                "mass {sum} cannot be normalized"
            )));
        }
        Self::new(coords.iter().map(|c| c / sum).collect())
    }

    /// The barycenter `(1/n, ..., 1/n)`.
    pub fn barycenter(len: usize) -> Self {
        Self {
            coords: vec![1.0 / len as f64; len],
        }
    }

    /// The vertex `e_i`.
    pub fn vertex(len: usize, i: usize) -> Self {
        let mut coords = vec![0.0; len];
        coords[i] = 1.0;
        Self { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        l1_distance(&self.coords, &other.coords)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<Vec<f64>> for SimplexVector {
    type Error = Error;
    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<SimplexVector> for Vec<f64> {
    fn from(v: SimplexVector) -> Self {
        v.coords
    }
}
