//! Measurements whose statistics do not depend on anyone's reference frame.
//!
//! A POVM on `n` qubits is gauge invariant when each element commutes with
//! every collective rotation `U^{⊗n}`. Such a measurement gives the same
//! distribution for `ψ` and `U^{⊗n}ψ`, so two parties can agree on its
//! outcome without sharing a frame.

mod generators;
mod povm;
mod spin;

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

pub use generators::{j1_generators, printed_j1_generators, J1Generators};
pub use povm::Povm;
pub use spin::{total_spin_projectors, IrrepProjector};

pub(crate) use povm::{complement, span_projector};

use crate::qmath::{c, Operator, PureState, Su2, C64};

/// Index into the Bell basis. `Zero` is the singlet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bell {
    Zero,
    X,
    Y,
    Z,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::Zero, Bell::X, Bell::Y, Bell::Z];

    /// The Pauli matrix `σ_j` (Hermitian), with `σ_0 = I`.
    pub fn sigma(self) -> Operator {
        match self {
            Bell::Zero => Operator::identity(1),
            Bell::X => pauli(1),
            Bell::Y => pauli(2),
            Bell::Z => pauli(3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Bell::Zero => "beta_0",
            Bell::X => "beta_x",
            Bell::Y => "beta_y",
            Bell::Z => "beta_z",
        }
    }
}

/// Hermitian Pauli matrix `σ_a`, `a ∈ {1, 2, 3}`.
pub(crate) fn pauli(a: usize) -> Operator {
    let gate = match a {
        1 => Su2::pauli_x(),
        2 => Su2::pauli_y(),
        3 => Su2::pauli_z(),
        _ => panic!("Pauli index must be 1, 2 or 3"),
    };
    // The SU(2) gates are iσ.
    Operator::from_su2(&gate).scale(c(0.0, -1.0))
}

/// The four Bell states.
#[derive(Clone, Debug, PartialEq)]
pub struct BellBasis {
    pub zero: PureState,
    pub x: PureState,
    pub y: PureState,
    pub z: PureState,
}

impl BellBasis {
    pub fn get(&self, j: Bell) -> &PureState {
        match j {
            Bell::Zero => &self.zero,
            Bell::X => &self.x,
            Bell::Y => &self.y,
            Bell::Z => &self.z,
        }
    }
}

fn two_term(a: &str, sign: f64, b: &str) -> PureState {
    PureState::superposition(&[(c(1.0, 0.0), a), (c(sign, 0.0), b)]).expect("valid Bell terms")
}

/// `β_0 = (|01⟩−|10⟩)/√2`, `β_x = (|00⟩−|11⟩)/√2`, `β_y = (|00⟩+|11⟩)/√2`,
/// `β_z = (|01⟩+|10⟩)/√2`.
pub fn bell_basis() -> BellBasis {
    BellBasis {
        zero: two_term("01", -1.0, "10"),
        x: two_term("00", -1.0, "11"),
        y: two_term("00", 1.0, "11"),
        z: two_term("01", 1.0, "10"),
    }
}

pub fn bell(j: Bell) -> PureState {
    static B: LazyLock<BellBasis> = LazyLock::new(bell_basis);
    B.get(j).clone()
}

/// Singlet/triplet measurement on two qubits, labels `singlet` and `triplet`.
pub fn povm2_singlet_triplet() -> Povm {
    static P: LazyLock<Povm> = LazyLock::new(build_povm2_singlet_triplet);
    P.clone()
}

fn build_povm2_singlet_triplet() -> Povm {
    let es = bell(Bell::Zero).projector();
    let et = complement(2, &[&es]);
    Povm::new(vec![("singlet".into(), es), ("triplet".into(), et)]).expect("singlet/triplet is a POVM")
}

/// `‖(U⊗U)β_j − (I ⊗ Uσ_jU†σ_j)β_j‖`.
pub fn ubell_conjugation(u: &Su2, j: Bell) -> f64 {
    let b = bell(j);
    let uu = Operator::tensor_power(u, 2);
    let uo = Operator::from_su2(u);
    let s = j.sigma();
    let right = Operator::identity(1).kron(&uo.compose(&s).compose(&uo.adjoint()).compose(&s));
    let lhs = b.apply(&uu).expect("two-qubit operator");
    let rhs = b.apply(&right).expect("two-qubit operator");
    (lhs.amplitudes() - rhs.amplitudes()).norm()
}

fn ket(terms: &[(f64, &str)]) -> PureState {
    let t: Vec<(C64, &str)> = terms.iter().map(|&(w, b)| (c(w, 0.0), b)).collect();
    PureState::superposition(&t).expect("valid basis terms")
}

/// The printed spanning vectors of the two three-qubit `J = 1/2` subspaces:
/// `λ = 0` (antisymmetric in the first pair) and `λ = 1`.
pub fn three_qubit_doublets() -> [[PureState; 2]; 2] {
    [
        [
            ket(&[(1.0, "010"), (-1.0, "100")]),
            ket(&[(1.0, "101"), (-1.0, "011")]),
        ],
        [
            ket(&[(2.0, "001"), (-1.0, "010"), (-1.0, "100")]),
            ket(&[(2.0, "110"), (-1.0, "101"), (-1.0, "011")]),
        ],
    ]
}

/// `{E_{1/2,0}, E_{1/2,1}, E_{3/2}}` on three qubits.
pub fn povm3() -> Povm {
    static P: LazyLock<Povm> = LazyLock::new(build_povm3);
    P.clone()
}

fn build_povm3() -> Povm {
    let [l0, l1] = three_qubit_doublets();
    let e0 = span_projector(&l0);
    let e1 = span_projector(&l1);
    let e32 = complement(3, &[&e0, &e1]);
    Povm::new(vec![
        ("J=1/2,lambda=0".into(), e0),
        ("J=1/2,lambda=1".into(), e1),
        ("J=3/2".into(), e32),
    ])
    .expect("three-qubit invariant POVM")
}

fn bell_pair(j: Bell) -> PureState {
    let b = bell(j);
    b.kron(&b)
}

/// `φ_{0,0} = β_0β_0` and `φ_{0,1} = (β_xβ_x − β_yβ_y + β_zβ_z)/√3`.
pub fn phi_invariant_states() -> (PureState, PureState) {
    static PHI: LazyLock<(PureState, PureState)> = LazyLock::new(build_phi_invariant_states);
    PHI.clone()
}

fn build_phi_invariant_states() -> (PureState, PureState) {
    let phi00 = bell_pair(Bell::Zero);
    let phi01 = PureState::combine(&[
        (c(1.0, 0.0), &bell_pair(Bell::X)),
        (c(-1.0, 0.0), &bell_pair(Bell::Y)),
        (c(1.0, 0.0), &bell_pair(Bell::Z)),
    ])
    .expect("four-qubit combination");
    (phi00, phi01)
}

/// Order of the relabeled expansion: `β_0β_0, β_yβ_y, β_zβ_z, β_xβ_x`.
pub const RELABEL_ORDER: [Bell; 4] = [Bell::Zero, Bell::Y, Bell::Z, Bell::X];

/// Coefficients `⟨β_j|_{13}⟨β_j|_{24} ψ⟩` of a four-qubit state, in
/// [`RELABEL_ORDER`].
pub fn relabel_coefficients(psi: &PureState) -> crate::Result<[C64; 4]> {
    if psi.n_qubits() != 4 {
        return crate::error::input("relabeling acts on four qubits");
    }
    let mut out = [c(0.0, 0.0); 4];
    for (slot, &j) in out.iter_mut().zip(RELABEL_ORDER.iter()) {
        // Pairs (0,1),(2,3) of the product moved onto wires (0,2),(1,3).
        let target = bell_pair(j).permute(&[0, 2, 1, 3])?;
        *slot = target.inner(psi)?;
    }
    Ok(out)
}

/// Four-qubit invariant POVM `{φ_{0,0}, φ_{0,1}, P_{J=1}, P_{J=2}}`.
pub fn povm4_invariant() -> Povm {
    static P: LazyLock<Povm> = LazyLock::new(build_povm4_invariant);
    P.clone()
}

fn build_povm4_invariant() -> Povm {
    let (phi00, phi01) = phi_invariant_states();
    let sectors = total_spin_projectors(4).expect("four qubits supported");
    let j1 = spin::sector_sum(&sectors, 2);
    let j2 = spin::sector_sum(&sectors, 4);
    Povm::new(vec![
        ("phi_00".into(), phi00.projector()),
        ("phi_01".into(), phi01.projector()),
        ("J=1".into(), j1),
        ("J=2".into(), j2),
    ])
    .expect("four-qubit invariant POVM")
}

/// [`povm4_invariant`] with the `J = 1` element split into its three
/// `λ`-labeled copies.
pub fn povm4_resolved() -> Povm {
    static P: LazyLock<Povm> = LazyLock::new(build_povm4_resolved);
    P.clone()
}

fn build_povm4_resolved() -> Povm {
    let (phi00, phi01) = phi_invariant_states();
    let sectors = total_spin_projectors(4).expect("four qubits supported");
    let mut items = vec![
        ("phi_00".to_string(), phi00.projector()),
        ("phi_01".to_string(), phi01.projector()),
    ];
    for p in sectors.iter().filter(|p| p.two_j == 2) {
        items.push((format!("J=1,lambda={}", p.lambda), p.projector.clone()));
    }
    items.push(("J=2".into(), spin::sector_sum(&sectors, 4)));
    Povm::new(items).expect("resolved four-qubit invariant POVM")
}

/// Total-spin measurement with every `(J, λ)` block as its own outcome.
pub fn total_spin_povm(n: usize) -> crate::Result<Povm> {
    let items = total_spin_projectors(n)?
        .into_iter()
        .map(|p| (p.label(), p.projector))
        .collect();
    Povm::new(items)
}

/// Every gauge-invariant POVM this module provides on `n` qubits. The
/// trivial one-outcome measurement is the only one on a single qubit.
pub fn invariant_povms(n: usize) -> crate::Result<Vec<Povm>> {
    Ok(match n {
        1 => vec![Povm::new(vec![("trivial".into(), Operator::identity(1))])?],
        2 => vec![povm2_singlet_triplet(), total_spin_povm(2)?],
        3 => vec![povm3(), total_spin_povm(3)?],
        4 => vec![povm4_invariant(), povm4_resolved(), total_spin_povm(4)?],
        _ => return crate::error::input(format!("no invariant POVMs provided for {n} qubits")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::equal_up_to_phase;
    use crate::seeding;

    fn haar_draws(seed: u64, k: usize) -> Vec<Su2> {
        let mut rng = seeding::master(seed);
        (0..k).map(|_| Su2::haar(&mut rng)).collect()
    }

    #[test]
    fn bell_basis_is_orthonormal() {
        let b = bell_basis();
        for i in Bell::ALL {
            for j in Bell::ALL {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((b.get(i).inner(b.get(j)).unwrap() - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn singlet_invariance() {
        let s = bell(Bell::Zero);
        for u in haar_draws(1, 100) {
            let moved = s.apply(&Operator::tensor_power(&u, 2)).unwrap();
            assert!(equal_up_to_phase(&s, &moved, 1e-12).unwrap());
        }
    }

    #[test]
    fn pauli_on_singlet_gives_bell_states() {
        let s = bell(Bell::Zero);
        let expect = [(Bell::X, c(-1.0, 0.0)), (Bell::Y, c(0.0, 1.0)), (Bell::Z, c(1.0, 0.0))];
        for (j, phase) in expect {
            let got = s.apply_on(&j.sigma(), &[0]).unwrap();
            let want = bell(j).scale(phase);
            assert!((got.amplitudes() - want.amplitudes()).norm() < 1e-15, "{j:?}");
        }
    }

    #[test]
    fn singlet_triplet_outcomes() {
        let povm = povm2_singlet_triplet();
        let p0 = povm.probabilities(&bell(Bell::Zero)).unwrap();
        let px = povm.probabilities(&bell(Bell::X)).unwrap();
        assert!((p0[0] - 1.0).abs() < 1e-15 && px[1] > 1.0 - 1e-15);
        for u in haar_draws(2, 100) {
            assert!(povm.collective_commutator(&u) < 1e-12);
        }
    }

    #[test]
    fn ubell_identity() {
        for j in Bell::ALL {
            assert!(ubell_conjugation(&Su2::identity(), j) < 1e-15);
        }
        assert!(ubell_conjugation(&Su2::z_rotation(0.7), Bell::Z) < 1e-15);
        for u in haar_draws(3, 100) {
            for j in Bell::ALL {
                assert!(ubell_conjugation(&u, j) < 1e-12);
            }
        }
    }

    #[test]
    fn printed_doublets_are_orthonormal() {
        let vs: Vec<PureState> = three_qubit_doublets().into_iter().flatten().collect();
        for (i, a) in vs.iter().enumerate() {
            for (j, b) in vs.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).unwrap() - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn povm3_structure() {
        let p = povm3();
        let ranks: Vec<usize> = p.elements().iter().map(|e| e.rank(1e-9)).collect();
        assert_eq!(ranks, vec![2, 2, 4]);
        assert!(p.completeness_residual() < 1e-12);
        let v = ket(&[(1.0, "010"), (-1.0, "100")]);
        assert!((v.apply(&p.elements()[0]).unwrap().amplitudes() - v.amplitudes()).norm() < 1e-15);
        for u in haar_draws(4, 100) {
            assert!(p.collective_commutator(&u) < 1e-12);
        }
    }

    #[test]
    fn phi_states() {
        let (a, b) = phi_invariant_states();
        assert!(a.inner(&b).unwrap().norm() < 1e-15);
        for u in haar_draws(5, 100) {
            let u4 = Operator::tensor_power(&u, 4);
            assert!((a.overlap(&a.apply(&u4).unwrap()).unwrap() - 1.0).abs() < 1e-12);
            assert!((b.overlap(&b.apply(&u4).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn relabeled_expansion() {
        let (a, b) = phi_invariant_states();
        let ca = relabel_coefficients(&a).unwrap();
        let cb = relabel_coefficients(&b).unwrap();
        let want_a = [0.5, 0.5, -0.5, -0.5];
        let r12 = 12f64.sqrt();
        let want_b = [-3.0 / r12, 1.0 / r12, -1.0 / r12, -1.0 / r12];
        for k in 0..4 {
            assert!((ca[k] - c(want_a[k], 0.0)).norm() < 1e-12);
            assert!((cb[k] - c(want_b[k], 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn povm4_structure() {
        for p in [povm4_invariant(), povm4_resolved()] {
            let total: usize = p.elements().iter().map(|e| e.rank(1e-9)).sum();
            assert_eq!(total, 16);
            assert!(p.completeness_residual() < 1e-12);
            assert!(p.min_eigenvalue() > -1e-10);
            for u in haar_draws(6, 100) {
                assert!(p.collective_commutator(&u) < 1e-12);
            }
        }
        let p = povm4_invariant();
        let ranks: Vec<usize> = p.elements().iter().map(|e| e.rank(1e-9)).collect();
        assert_eq!(ranks, vec![1, 1, 9, 5]);
        let probs = p.probabilities(&phi_invariant_states().1).unwrap();
        assert!((probs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn statistics_ignore_collective_rotations() {
        let mut rng = seeding::master(7);
        for n in 2..=4 {
            let psi = PureState::normalized(
                (0..1 << n)
                    .map(|_| {
                        let u = Su2::haar(&mut rng);
                        u.matrix()[(0, 0)]
                    })
                    .collect(),
            )
            .unwrap();
            for povm in invariant_povms(n).unwrap() {
                for u in haar_draws(8 + n as u64, 20) {
                    let moved = psi.apply(&Operator::tensor_power(&u, n)).unwrap();
                    let (p, q) = (povm.probabilities(&psi).unwrap(), povm.probabilities(&moved).unwrap());
                    for (x, y) in p.iter().zip(&q) {
                        assert!((x - y).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
