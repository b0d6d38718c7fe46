//! SU(2) matrices: the frames, channels and single-qubit gates of the model.

use std::fmt;
use std::ops::Mul;

use nalgebra::Matrix2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{c, C64, STRUCT_TOL};
use crate::error::{input, Result};

/// A 2×2 complex unitary with unit determinant.
///
/// Stored as `[[a + ib, c + id], [-c + id, a - ib]]`, i.e. the unit
/// quaternion `(a, b, c, d)` acting on the two-dimensional representation.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[[f64; 2]; 2]; 2]", into = "[[[f64; 2]; 2]; 2]")]
pub struct Su2(Matrix2<C64>);

impl Su2 {
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    /// Builds from raw entries, checking unitarity and determinant to `1e-12`.
    pub fn from_matrix(m: Matrix2<C64>) -> Result<Self> {
        let u = Self(m);
        let unit = (m.adjoint() * m - Matrix2::identity())
            .iter()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()));
        if unit > STRUCT_TOL {
            return input(format!("matrix is not unitary (deviation {unit:e})"));
        }
        let det = (m.determinant() - c(1.0, 0.0)).norm();
        if det > STRUCT_TOL {
            return input(format!("determinant differs from 1 by {det:e}"));
        }
        Ok(u)
    }

    /// Unit quaternion `(a, b, c, d)`, renormalized.
    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return input("quaternion must be finite and nonzero");
        }
        let [a, b, cc, d] = q.map(|x| x / norm);
        Ok(Self(Matrix2::new(c(a, b), c(cc, d), c(-cc, d), c(a, -b))))
    }

    /// `cos(angle/2)·I + i·sin(angle/2)·(axis·σ)`.
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return input(format!("rotation axis must be a unit vector (|axis| = {norm})"));
        }
        if !angle.is_finite() {
            return input("rotation angle must be finite");
        }
        Ok(Self::exp_unit(axis, angle))
    }

    /// `exp(i v·σ / 2)` for an arbitrary rotation vector `v`.
    pub fn from_rotation_vector(v: [f64; 3]) -> Self {
        let angle = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if angle == 0.0 {
            return Self::identity();
        }
        Self::exp_unit(v.map(|x| x / angle), angle)
    }

    fn exp_unit(n: [f64; 3], angle: f64) -> Self {
        let (s, co) = (angle / 2.0).sin_cos();
        Self(Matrix2::new(
            c(co, s * n[2]),
            c(s * n[1], s * n[0]),
            c(-s * n[1], s * n[0]),
            c(co, -s * n[2]),
        ))
    }

    /// Rotation about the polar axis, `exp(i φ σ_z / 2)`.
    pub fn z_rotation(phi: f64) -> Self {
        Self::exp_unit([0.0, 0.0, 1.0], phi)
    }

    /// Haar-distributed draw: four standard normals normalized to a unit
    /// quaternion.
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(u) = Self::from_quaternion(q) {
                return u;
            }
        }
    }

    /// Pauli gates as SU(2) elements, `iσ_j`. They equal the Pauli matrices
    /// up to the global phase `i`.
    pub fn pauli_x() -> Self {
        Self(Matrix2::new(c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)))
    }

    pub fn pauli_y() -> Self {
        Self(Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)))
    }

    pub fn pauli_z() -> Self {
        Self(Matrix2::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn quaternion(&self) -> [f64; 4] {
        let m = &self.0;
        [m[(0, 0)].re, m[(0, 0)].im, m[(0, 1)].re, m[(0, 1)].im]
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0).iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        (*self * *other).max_diff(&(*other * *self)) <= tol
    }

    /// Principal logarithm as a rotation vector `v` with `self = exp(i v·σ/2)`
    /// and `|v| ∈ [0, 2π]`.
    ///
    /// At `-I` every axis works; the axis with nonnegative z-component wins,
    /// ties broken by nonnegative x, which here means `+z`.
    pub fn log(&self) -> [f64; 3] {
        let [a, b, cc, d] = self.quaternion();
        let (nx, ny, nz) = (d, cc, b);
        let s = (nx * nx + ny * ny + nz * nz).sqrt();
        let half = s.atan2(a);
        if s < 1e-300 {
            return if a > 0.0 {
                [0.0; 3]
            } else {
                [0.0, 0.0, 2.0 * std::f64::consts::PI]
            };
        }
        [nx, ny, nz].map(|x| x / s * 2.0 * half)
    }

    /// Applies the matrix to a single-qubit coefficient vector.
    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[(0, 0)] * v[0] + m[(0, 1)] * v[1],
            m[(1, 0)] * v[0] + m[(1, 1)] * v[1],
        ]
    }
}

impl Default for Su2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for Su2 {
    type Output = Su2;

    fn mul(self, rhs: Su2) -> Su2 {
        Su2(self.0 * rhs.0)
    }
}

impl fmt::Debug for Su2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "Su2[[{}, {}], [{}, {}]]",
            m[(0, 0)],
            m[(0, 1)],
            m[(1, 0)],
            m[(1, 1)]
        )
    }
}

/// Row-major `[re, im]` pairs.
impl From<Su2> for [[[f64; 2]; 2]; 2] {
    fn from(u: Su2) -> Self {
        let m = u.0;
        std::array::from_fn(|r| std::array::from_fn(|col| [m[(r, col)].re, m[(r, col)].im]))
    }
}

impl TryFrom<[[[f64; 2]; 2]; 2]> for Su2 {
    type Error = crate::error::Error;

    fn try_from(raw: [[[f64; 2]; 2]; 2]) -> Result<Self> {
        let e = |r: usize, col: usize| c(raw[r][col][0], raw[r][col][1]);
        Su2::from_matrix(Matrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1)))
    }
}
