//! Points, normal vectors and oriented hyperplanes.
//!
//! A hyperplane is stored as a unit normal `v` and an offset `lambda`;
//! the closed positive half-space is `{x : <x,v> >= lambda}` and the
//! negative one is `{x : <x,v> <= lambda}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the unit-normal invariant of [`Hyperplane`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A point or direction in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn axpy(&self, s: f64, other: &Vector) -> Vector {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.sub(other).norm()
    }

    /// Returns `self / |self|`, or an error for the zero vector.
    pub fn normalized(&self) -> Result<Vector> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

/// Rotate a planar vector by 90 degrees counter-clockwise.
pub fn perp2(v: &Vector) -> Vector {
    debug_assert_eq!(v.dim(), 2);
    Vector(vec![-v.0[1], v.0[0]])
}

/// An oriented hyperplane `{x : <x,v> = lambda}` with unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    normal: Vector,
    offset: f64,
}

impl Hyperplane {
    /// Builds a hyperplane from any nonzero normal, normalizing it
    /// (the offset is rescaled so the plane is unchanged).
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if n == 0.0 || !n.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidParameter(
                "hyperplane needs a nonzero finite normal and finite offset".into(),
            ));
        }
        Ok(Hyperplane {
            normal: normal.scale(1.0 / n),
            offset: offset / n,
        })
    }

    /// Wraps an already-unit normal, checked to `UNIT_NORM_TOL`.
    pub fn from_unit(normal: Vector, offset: f64) -> Result<Self> {
        if (normal.norm() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "normal is not unit length: |v| = {}",
                normal.norm()
            )));
        }
        Ok(Hyperplane { normal, offset })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// Signed distance `<x,v> - lambda`; nonnegative on the positive side.
    pub fn signed_dist(&self, x: &Vector) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// The same plane with reversed orientation.
    pub fn flipped(&self) -> Hyperplane {
        Hyperplane {
            normal: self.normal.scale(-1.0),
            offset: -self.offset,
        }
    }
}

/// Side of a hyperplane: `+1` for `H^+`, `-1` for `H^-`.
pub type Side = i8;

/// Builds an orthonormal basis of the tangent space at unit vector `v`,
/// i.e. `n-1` unit vectors orthogonal to `v` and each other.
pub fn tangent_basis(v: &Vector) -> Vec<Vector> {
    let n = v.dim();
    let mut basis: Vec<Vector> = Vec::with_capacity(n - 1);
    // Gram-Schmidt the coordinate axes against v, skipping the axis
    // most aligned with v.
    let skip = v
        .0
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    for i in 0..n {
        if i == skip {
            continue;
        }
        let mut e = Vector::zeros(n);
        e.0[i] = 1.0;
        let mut w = e.axpy(-e.dot(v), v);
        for b in &basis {
            w = w.axpy(-w.dot(b), b);
        }
        let norm = w.norm();
        if norm > 1e-12 {
            basis.push(w.scale(1.0 / norm));
        }
    }
    debug_assert_eq!(basis.len(), n - 1);
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperplane_normalizes() {
        let h = Hyperplane::new(Vector::new(vec![3.0, 4.0]), 10.0).unwrap();
        assert!((h.normal().norm() - 1.0).abs() < 1e-15);
        assert!((h.offset() - 2.0).abs() < 1e-15);
        // same plane: signed distances agree
        let x = Vector::new(vec![2.0, 1.0]);
        assert!((h.signed_dist(&x) - (6.0 + 4.0 - 10.0) / 5.0).abs() < 1e-15);
    }

    #[test]
    fn zero_normal_rejected() {
        assert!(Hyperplane::new(Vector::new(vec![0.0, 0.0]), 1.0).is_err());
    }

    #[test]
    fn flip_reverses_sides() {
        let h = Hyperplane::new(Vector::new(vec![1.0, 0.0]), 0.25).unwrap();
        let x = Vector::new(vec![1.0, 0.0]);
        assert!(h.signed_dist(&x) > 0.0);
        assert!(h.flipped().signed_dist(&x) < 0.0);
    }

    #[test]
    fn tangent_basis_orthonormal() {
        for v in [
            Vector::new(vec![1.0, 0.0, 0.0]),
            Vector::new(vec![0.6, 0.8, 0.0]),
            Vector::new(vec![1.0, 2.0, -3.0]).normalized().unwrap(),
        ] {
            let basis = tangent_basis(&v);
            assert_eq!(basis.len(), 2);
            for (i, b) in basis.iter().enumerate() {
                assert!(b.dot(&v).abs() < 1e-12);
                assert!((b.norm() - 1.0).abs() < 1e-12);
                for b2 in &basis[i + 1..] {
                    assert!(b.dot(b2).abs() < 1e-12);
                }
            }
        }
    }
}
