use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of the ambient space: a finite sequence of binary64 reals.
///
/// All entries are finite; constructors reject NaN and infinities so that
/// downstream numerics never have to re-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite { index: i, value: c });
            }
        }
        if coords.is_empty() {
            return Err(Error::OutOfRange("vector dimension must be >= 1".into()));
        }
        Ok(Self { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    /// Euclidean dot product (also the pairing against dual elements,
    /// which in these finite-dimensional instances are coordinate vectors).
    pub fn dot(&self, other: &Vector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, a: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|c| a * c).collect(),
        }
    }

    /// self + a * other
    pub fn axpy(&self, a: f64, other: &Vector) -> Vector {
        self.zip_with(other, |x, y| x + a * y)
    }

    fn zip_with(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn arithmetic() {
        let x = Vector::new(vec![1.0, 2.0]).unwrap();
        let y = Vector::new(vec![3.0, -1.0]).unwrap();
        assert_eq!(x.add(&y).coords(), &[4.0, 1.0]);
        assert_eq!(x.sub(&y).coords(), &[-2.0, 3.0]);
        assert_eq!(x.axpy(2.0, &y).coords(), &[7.0, 0.0]);
        assert_eq!(x.dot(&y), 1.0);
    }
}
