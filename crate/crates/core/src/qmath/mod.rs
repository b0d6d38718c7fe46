//! Dense complex linear algebra for systems of at most six qubits.
//!
//! Wire 0 is the leftmost tensor factor and the most significant bit of an
//! amplitude index, everywhere in the crate.

mod density;
mod operator;
mod state;
mod su2;

pub use density::DensityOperator;
pub use operator::Operator;
pub(crate) use operator::eigh_matrix;
pub use state::{equal_up_to_phase, PureState};
pub use su2::Su2;

pub use num_complex::Complex64 as C64;

/// Tolerance for structural invariants (unitarity, normalization, ...).
pub const STRUCT_TOL: f64 = 1e-12;

/// Largest supported register.
pub const MAX_QUBITS: usize = 6;

#[inline]
pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Bit mask of `wire` within an `n`-qubit index.
#[inline]
pub(crate) fn wire_mask(wire: usize, n: usize) -> usize {
    1 << (n - 1 - wire)
}

pub(crate) fn check_wires(wires: &[usize], n: usize) -> crate::Result<()> {
    for (i, &w) in wires.iter().enumerate() {
        if w >= n {
            return crate::error::input(format!("wire {w} out of range for {n} qubits"));
        }
        if wires[..i].contains(&w) {
            return crate::error::input(format!("wire {w} listed twice"));
        }
    }
    Ok(())
}

/// Sub-index formed by the bits of `index` on `wires`, first wire most significant.
#[inline]
pub(crate) fn gather_bits(index: usize, wires: &[usize], n: usize) -> usize {
    wires
        .iter()
        .fold(0, |acc, &w| (acc << 1) | usize::from(index & wire_mask(w, n) != 0))
}

/// Inverse of [`gather_bits`]: places the bits of `sub` onto `wires` of `base`.
#[inline]
pub(crate) fn scatter_bits(base: usize, sub: usize, wires: &[usize], n: usize) -> usize {
    let m = wires.len();
    wires.iter().enumerate().fold(base, |acc, (k, &w)| {
        if sub & (1 << (m - 1 - k)) != 0 {
            acc | wire_mask(w, n)
        } else {
            acc & !wire_mask(w, n)
        }
    })
}
