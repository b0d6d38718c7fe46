use std::fmt;

use nalgebra::{DMatrix, Matrix2};

use super::{c, check_wires, gather_bits, Su2, C64, MAX_QUBITS};
use crate::error::{input, Result};

/// Square operator on `n` qubits.
#[derive(Clone, PartialEq)]
pub struct Operator {
    n: usize,
    m: DMatrix<C64>,
}

impl Operator {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            m: DMatrix::identity(1 << n, 1 << n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            m: DMatrix::zeros(1 << n, 1 << n),
        }
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() {
            return input(format!(
                "operator must be square with power-of-two dimension, got {}x{}",
                m.nrows(),
                m.ncols()
            ));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return input(format!("{n} qubits exceeds the supported maximum"));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return input("operator entries must be finite");
        }
        Ok(Self { n, m })
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        let n = m.nrows().trailing_zeros() as usize;
        Self { n, m }
    }

    pub fn from_su2(u: &Su2) -> Self {
        Self::from_su2_matrix(u.matrix())
    }

    pub(crate) fn from_su2_matrix(m: &Matrix2<C64>) -> Self {
        Self {
            n: 1,
            m: DMatrix::from_fn(2, 2, |r, col| m[(r, col)]),
        }
    }

    /// `|ψ⟩⟨ψ|` from raw amplitudes.
    pub(crate) fn outer(amps: &nalgebra::DVector<C64>) -> Self {
        Self::from_matrix_unchecked(amps * amps.adjoint())
    }

    /// Controlled NOT, control on the first wire.
    pub fn cnot() -> Self {
        let mut m = DMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(r, col)] = c(1.0, 0.0);
        }
        Self::from_matrix_unchecked(m)
    }

    /// `u ⊗ u ⊗ … ⊗ u`, `n` factors.
    pub fn tensor_power(u: &Su2, n: usize) -> Self {
        let single = Self::from_su2(u);
        (1..n).fold(single, |acc, _| acc.kron(&Self::from_su2(u)))
    }

    /// Tensor product of single-qubit unitaries, one per wire.
    pub fn product(us: &[Su2]) -> Self {
        us.iter()
            .map(Self::from_su2)
            .reduce(|acc, u| acc.kron(&u))
            .unwrap_or_else(|| Self::identity(0))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            n: self.n + other.n,
            m: self.m.kronecker(&other.m),
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            m: &self.m * &other.m,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            m: self.m.adjoint(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            n: self.n,
            m: &self.m * z,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            m: &self.m + &other.m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            m: &self.m - &other.m,
        }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// `‖[self, other]‖_max`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.compose(other).max_diff(&other.compose(self))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().compose(self).max_diff(&Self::identity(self.n)) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_diff(&self.adjoint()) <= tol
    }

    /// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
    /// Columns of the returned matrix are the eigenvectors.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        eigh_matrix(&self.m)
    }

    /// Rank of a Hermitian operator, counting eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigh().0.iter().filter(|&&l| l.abs() > tol).count()
    }

    /// Square root of a positive semidefinite operator.
    pub fn psd_sqrt(&self) -> Self {
        let (vals, vecs) = self.eigh();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&l| c(l.max(0.0).sqrt(), 0.0)),
        ));
        Self::from_matrix_unchecked(&vecs * d * vecs.adjoint())
    }

    /// Operator acting as `gate` on `wires` of an `n`-qubit register and as the
    /// identity elsewhere.
    pub fn embed(gate: &Operator, wires: &[usize], n: usize) -> Result<Self> {
        check_wires(wires, n)?;
        if gate.n != wires.len() {
            return input(format!(
                "gate acts on {} qubits but {} wires given",
                gate.n,
                wires.len()
            ));
        }
        let dim = 1usize << n;
        let wire_bits = wires.iter().fold(0, |acc, &w| acc | super::wire_mask(w, n));
        let m = DMatrix::from_fn(dim, dim, |r, col| {
            if r & !wire_bits != col & !wire_bits {
                return c(0.0, 0.0);
            }
            gate.m[(gather_bits(r, wires, n), gather_bits(col, wires, n))]
        });
        Ok(Self { n, m })
    }
}

/// Hermitian eigen-decomposition of any square matrix, eigenvalues ascending.
pub(crate) fn eigh_matrix(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    // Symmetrize so tiny anti-Hermitian noise cannot leak in.
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({} qubits)", self.n)?;
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|col| {
                    let z = self.m[(r, col)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn x() -> Operator {
        Operator::from_matrix(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap()
    }

    fn cnot() -> Operator {
        Operator::cnot()
    }

    #[test]
    fn embed_single_wire() {
        assert_eq!(Operator::embed(&x(), &[0], 1).unwrap(), x());
        let ix = Operator::identity(1).kron(&x());
        assert_eq!(Operator::embed(&x(), &[1], 2).unwrap(), ix);
    }

    #[test]
    fn embed_cnot_matches_enumerated_wiring() {
        // control = wire 2, target = wire 0
        let e = Operator::embed(&cnot(), &[2, 0], 3).unwrap();
        for input in 0..8usize {
            let control = input & 1;
            let output = if control == 1 { input ^ 0b100 } else { input };
            for r in 0..8 {
                let want = if r == output { 1.0 } else { 0.0 };
                assert_eq!(e.matrix()[(r, input)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn embed_rejects_bad_wires() {
        assert!(Operator::embed(&cnot(), &[1, 1], 3).is_err());
        assert!(Operator::embed(&x(), &[3], 3).is_err());
        assert!(Operator::embed(&cnot(), &[0], 3).is_err());
    }

    #[test]
    fn embed_preserves_unitarity() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = Operator::tensor_power(&Su2::haar(&mut rng), 1)
                .kron(&Operator::from_su2(&Su2::haar(&mut rng)));
            let e = Operator::embed(&u, &[3, 1], 4).unwrap();
            assert!(e.is_unitary(1e-12));
        }
        let not_unitary = x().scale(c(2.0, 0.0));
        assert!(!Operator::embed(&not_unitary, &[0], 2).unwrap().is_unitary(1e-12));
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let u = Operator::tensor_power(&Su2::haar(&mut rng), 2);
        let d = Operator::from_matrix(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            vec![c(3.0, 0.0), c(-1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
        )))
        .unwrap();
        let h = u.compose(&d).compose(&u.adjoint());
        let (vals, vecs) = h.eigh();
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[3] - 3.0).abs() < 1e-12);
        let back = Operator::from_matrix_unchecked(
            &vecs
                * DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    4,
                    vals.iter().map(|&l| c(l, 0.0)),
                ))
                * vecs.adjoint(),
        );
        assert!(back.max_diff(&h) < 1e-12);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Operator::from_matrix(DMatrix::zeros(3, 3)).is_err());
        assert!(Operator::from_matrix(DMatrix::zeros(2, 4)).is_err());
    }
}
