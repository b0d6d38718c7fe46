use nalgebra::{DMatrix, Matrix3};

use super::bell_basis;
use crate::qmath::{c, Operator, Su2, C64};

/// Generators `t_x, t_y, t_z` of the triplet representation, written in
/// the basis `{β_x, β_y, β_z}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct J1Generators(pub [Matrix3<C64>; 3]);

impl J1Generators {
    pub fn get(&self, a: usize) -> &Matrix3<C64> {
        &self.0[a]
    }

    /// `max_{a,b} ‖[t_a, t_b] − i ε_abc t_c‖_max`.
    pub fn algebra_residual(&self) -> f64 {
        let t = &self.0;
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let comm = t[a] * t[b] - t[b] * t[a];
                let mut want = Matrix3::zeros();
                for (k, tk) in t.iter().enumerate() {
                    want += tk * c(0.0, levi_civita(a, b, k));
                }
                worst = worst.max((comm - want).camax());
            }
        }
        worst
    }

    /// Entry-wise distance to another set, per generator.
    pub fn distance(&self, other: &Self) -> [f64; 3] {
        [0, 1, 2].map(|a| (self.0[a] - other.0[a]).camax())
    }
}

pub(crate) fn levi_civita(a: usize, b: usize, k: usize) -> f64 {
    match (a, b, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `B† (U⊗U) B` with `U = exp(iεσ_a)` and `B = [β_x β_y β_z]`.
fn triplet_block(a: usize, eps: f64) -> Matrix3<C64> {
    let mut axis = [0.0; 3];
    axis[a] = 1.0;
    // exp(iεσ) is a rotation by 2ε.
    let u = Su2::from_axis_angle(axis, 2.0 * eps).expect("unit axis");
    let uu = Operator::tensor_power(&u, 2);
    let b = bell_basis();
    let cols = [&b.x, &b.y, &b.z];
    let basis = DMatrix::from_fn(4, 3, |r, k| cols[k].amplitudes()[r]);
    let m = basis.adjoint() * uu.matrix() * &basis;
    Matrix3::from_fn(|r, k| m[(r, k)])
}

/// Central difference in `ε`, refined by a Richardson table over halving steps.
fn derivative(a: usize) -> Matrix3<C64> {
    const LEVELS: usize = 5;
    let h0 = 0.05;
    let mut table: Vec<Matrix3<C64>> = (0..LEVELS)
        .map(|k| {
            let h = h0 / f64::powi(2.0, k as i32);
            (triplet_block(a, h) - triplet_block(a, -h)) * c(0.5 / h, 0.0)
        })
        .collect();
    // Central differences have even error terms, so each level gains h².
    for level in 1..LEVELS {
        let factor = f64::powi(4.0, level as i32);
        for k in (level..LEVELS).rev() {
            table[k] = (table[k] * c(factor, 0.0) - table[k - 1]) * c(1.0 / (factor - 1.0), 0.0);
        }
    }
    table[LEVELS - 1]
}

/// Derives the generators from the first-order action of `U⊗U` on the
/// triplet, `U⊗U = exp(2iε_a t_a)`, so `t_a = (∂_ε B†(U⊗U)B)/2i` at 0.
pub fn j1_generators() -> J1Generators {
    J1Generators([0, 1, 2].map(|a| derivative(a) * c(0.0, -0.5)))
}

/// Reference generator matrices, kept for cross-checking the derived set.
pub fn printed_j1_generators() -> J1Generators {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    J1Generators([
        Matrix3::new(z, z, z, z, z, one, z, one, z),
        Matrix3::new(z, z, i, z, z, z, -i, z, z),
        Matrix3::new(z, one, z, one, z, z, z, z, z),
    ])
}

/// `B† (σ_a ⊗ I + I ⊗ σ_a) B / 2`, the closed-form generator, for tests.
#[cfg(test)]
fn closed_form(a: usize) -> Matrix3<C64> {
    let s = super::pauli(a + 1);
    let sum = s.kron(&Operator::identity(1)).add(&Operator::identity(1).kron(&s));
    let b = bell_basis();
    let cols = [&b.x, &b.y, &b.z];
    let basis = DMatrix::from_fn(4, 3, |r, k| cols[k].amplitudes()[r]);
    let m = basis.adjoint() * sum.matrix() * &basis * c(0.5, 0.0);
    Matrix3::from_fn(|r, k| m[(r, k)])
}
