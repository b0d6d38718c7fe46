use nalgebra::DMatrix;

use super::{c, check_wires, gather_bits, Operator, PureState, C64, STRUCT_TOL};
use crate::error::{input, Result};

/// Hermitian, unit-trace, positive semidefinite operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            op: psi.projector(),
        }
    }

    pub fn from_operator(op: Operator) -> Result<Self> {
        if !op.is_hermitian(STRUCT_TOL) {
            return input("density operator must be Hermitian");
        }
        let tr = op.trace();
        if (tr - c(1.0, 0.0)).norm() > STRUCT_TOL {
            return input(format!("density operator must have unit trace, got {tr}"));
        }
        if op.eigh().0.first().is_some_and(|&l| l < -1e-10) {
            return input("density operator has a negative eigenvalue");
        }
        Ok(Self { op })
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(terms: &[(f64, &PureState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| crate::Error::Input("empty mixture".into()))?;
        let mut acc = Operator::zeros(first.1.n_qubits());
        for (p, psi) in terms {
            if psi.n_qubits() != first.1.n_qubits() {
                return input("mixture components differ in qubit count");
            }
            acc = acc.add(&psi.projector().scale(c(*p, 0.0)));
        }
        Self::from_operator(acc)
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn trace(&self) -> C64 {
        self.op.trace()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.op.max_diff(&other.op)
    }

    /// `tr(ρ E)` as a real number.
    pub fn expectation(&self, e: &Operator) -> f64 {
        self.op.compose(e).trace().re
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.op.rank(tol)
    }

    /// Reduced operator on `keep`, in the listed order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.n_qubits();
        if keep.is_empty() {
            return input("partial trace needs at least one kept wire");
        }
        check_wires(keep, n)?;
        let traced: Vec<usize> = (0..n).filter(|w| !keep.contains(w)).collect();
        let dk = 1usize << keep.len();
        let m = self.op.matrix();
        let mut out = DMatrix::<C64>::zeros(dk, dk);
        // Enumerate full indices once; bucket by traced-out bits.
        for r in 0..m.nrows() {
            let rt = gather_bits(r, &traced, n);
            let rk = gather_bits(r, keep, n);
            for col in 0..m.ncols() {
                if gather_bits(col, &traced, n) == rt {
                    out[(rk, gather_bits(col, keep, n))] += m[(r, col)];
                }
            }
        }
        Ok(Self {
            op: Operator::from_matrix_unchecked(out),
        })
    }
}
