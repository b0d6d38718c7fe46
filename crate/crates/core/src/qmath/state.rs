use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{c, check_wires, gather_bits, scatter_bits, DensityOperator, Operator, Su2, C64};
use super::{MAX_QUBITS, STRUCT_TOL};
use crate::error::{input, Result};

/// Normalized amplitude vector over `n ≤ 6` qubits.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct PureState {
    n: usize,
    amps: DVector<C64>,
}

impl PureState {
    /// Takes the amplitudes as given; they must already be normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let s = Self::from_vec(amps)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return input(format!("state is not normalized (norm {norm})"));
        }
        Ok(s)
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let s = Self::from_vec(amps)?;
        let norm = s.norm();
        if norm < 1e-300 {
            return input("cannot normalize the zero vector");
        }
        Ok(Self {
            n: s.n,
            amps: s.amps / c(norm, 0.0),
        })
    }

    fn from_vec(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return input(format!("amplitude count {dim} is not a power of two"));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return input(format!("{n} qubits exceeds the supported maximum"));
        }
        if amps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return input("amplitudes must be finite");
        }
        Ok(Self {
            n,
            amps: DVector::from_vec(amps),
        })
    }

    pub(crate) fn from_dvector_unchecked(amps: DVector<C64>) -> Self {
        Self {
            n: amps.len().trailing_zeros() as usize,
            amps,
        }
    }

    /// Computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = DVector::zeros(1 << n);
        amps[index] = c(1.0, 0.0);
        Self { n, amps }
    }

    /// Basis state from a bit string such as `"0110"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        if n == 0 || n > MAX_QUBITS || !bits.chars().all(|ch| ch == '0' || ch == '1') {
            return input(format!("invalid bit string {bits:?}"));
        }
        Ok(Self::basis(n, usize::from_str_radix(bits, 2).expect("checked bits")))
    }

    /// Normalized superposition `Σ w_i |bits_i⟩`.
    pub fn superposition(terms: &[(C64, &str)]) -> Result<Self> {
        let n = terms.first().map(|t| t.1.len()).unwrap_or(0);
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        for &(w, bits) in terms {
            let b = Self::from_bits(bits)?;
            if b.n != n {
                return input("bit strings differ in length");
            }
            amps[usize::from_str_radix(bits, 2).expect("checked bits")] += w;
        }
        Self::normalized(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.n != other.n {
            return input(format!(
                "qubit count mismatch: {} vs {}",
                self.n, other.n
            ));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            n: self.n + other.n,
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            n: self.n,
            amps: &self.amps * z,
        }
    }

    /// Applies a full-register operator. Norm is not re-checked.
    pub fn apply(&self, op: &Operator) -> Result<Self> {
        if op.n_qubits() != self.n {
            return input(format!(
                "operator on {} qubits applied to {} qubit state",
                op.n_qubits(),
                self.n
            ));
        }
        Ok(Self {
            n: self.n,
            amps: op.matrix() * &self.amps,
        })
    }

    /// Applies `gate` to `wires` without building the full operator.
    pub fn apply_on(&self, gate: &Operator, wires: &[usize]) -> Result<Self> {
        check_wires(wires, self.n)?;
        if gate.n_qubits() != wires.len() {
            return input(format!(
                "gate acts on {} qubits but {} wires given",
                gate.n_qubits(),
                wires.len()
            ));
        }
        let sub = gate.dim();
        let g = gate.matrix();
        let offsets: Vec<usize> = (0..sub).map(|k| scatter_bits(0, k, wires, self.n)).collect();
        let touched = offsets[sub - 1];
        let mut out = self.amps.clone();
        let mut buf = [C64::new(0.0, 0.0); 1 << MAX_QUBITS];
        for base in (0..self.dim()).filter(|b| b & touched == 0) {
            for (slot, &o) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base | o];
            }
            for (r, &o) in offsets.iter().enumerate() {
                out[base | o] = (0..sub).map(|k| g[(r, k)] * buf[k]).sum();
            }
        }
        Ok(Self { n: self.n, amps: out })
    }

    pub fn apply_su2(&self, u: &Su2, wire: usize) -> Result<Self> {
        self.apply_on(&Operator::from_su2(u), &[wire])
    }

    /// Reorders wires: new wire `i` is old wire `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n {
            return input("permutation length must equal the qubit count");
        }
        check_wires(order, self.n)?;
        let mut amps = DVector::zeros(self.dim());
        for old in 0..self.dim() {
            amps[gather_bits(old, order, self.n)] = self.amps[old];
        }
        Ok(Self { n: self.n, amps })
    }

    /// `⟨self|op|self⟩`.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        Ok(self.amps.dotc(&self.apply(op)?.amps))
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }

    pub fn projector(&self) -> Operator {
        Operator::outer(&self.amps)
    }

    /// Conditional state of the other wires given `wire` reads `bit`;
    /// the wire is removed and the result renormalized.
    pub fn fix_wire(&self, wire: usize, bit: usize) -> Result<Self> {
        check_wires(&[wire], self.n)?;
        if self.n < 2 || bit > 1 {
            return input("need a wire to keep and a bit value of 0 or 1");
        }
        let mask = super::wire_mask(wire, self.n);
        let low = mask - 1;
        let amps: Vec<C64> = (0..self.dim() / 2)
            .map(|k| {
                let idx = ((k & !low) << 1) | (k & low) | if bit == 1 { mask } else { 0 };
                self.amps[idx]
            })
            .collect();
        Self::normalized(amps)
    }

    /// `|a⟩ ± |b⟩`-style combinations; renormalizes the result.
    pub fn combine(terms: &[(C64, &PureState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| crate::Error::Input("no terms".into()))?;
        let mut amps = DVector::zeros(first.1.dim());
        for (w, s) in terms {
            if s.n != first.1.n {
                return input("qubit count mismatch in combination");
            }
            amps += &s.amps * *w;
        }
        Self::normalized(amps.iter().copied().collect())
    }
}

/// True iff `|⟨a|b⟩| ≥ 1 − tol`.
pub fn equal_up_to_phase(a: &PureState, b: &PureState, tol: f64) -> Result<bool> {
    Ok(a.overlap(b)? >= 1.0 - tol)
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-12)
            .map(|(i, z)| format!("({:+.4}{:+.4}i)|{:0w$b}⟩", z.re, z.im, i, w = self.n))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    amplitudes: Vec<[f64; 2]>,
}

impl From<PureState> for StateRecord {
    fn from(s: PureState) -> Self {
        Self {
            amplitudes: s.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateRecord> for PureState {
    type Error = crate::Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        PureState::new(r.amplitudes.iter().map(|a| c(a[0], a[1])).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn singlet() -> PureState {
        PureState::superposition(&[(c(1.0, 0.0), "01"), (c(-1.0, 0.0), "10")]).unwrap()
    }

    #[test]
    fn phase_equality() {
        let psi = PureState::superposition(&[(c(0.3, 0.1), "0"), (c(-0.2, 0.9), "1")]).unwrap();
        let rotated = psi.scale(C64::from_polar(1.0, 1.234));
        assert!(equal_up_to_phase(&psi, &rotated, 1e-12).unwrap());
        let zero = PureState::from_bits("0").unwrap();
        let one = PureState::from_bits("1").unwrap();
        assert!(!equal_up_to_phase(&zero, &one, 1e-12).unwrap());
        assert!(equal_up_to_phase(&zero, &singlet(), 1e-12).is_err());
    }

    #[test]
    fn singlet_invariant_under_collective_rotation() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let s = singlet();
        for _ in 0..100 {
            let uu = Operator::tensor_power(&Su2::haar(&mut rng), 2);
            assert!(equal_up_to_phase(&s, &s.apply(&uu).unwrap(), 1e-12).unwrap());
        }
    }

    #[test]
    fn apply_on_matches_embedding() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let psi = PureState::normalized(
            (0..16).map(|i| c((i as f64).sin(), (i as f64 * 0.7).cos())).collect(),
        )
        .unwrap();
        let gate = Operator::from_su2(&Su2::haar(&mut rng)).kron(&Operator::from_su2(&Su2::haar(&mut rng)));
        let fast = psi.apply_on(&gate, &[3, 1]).unwrap();
        let slow = psi.apply(&Operator::embed(&gate, &[3, 1], 4).unwrap()).unwrap();
        assert!((fast.amplitudes() - slow.amplitudes()).norm() < 1e-13);
    }

    #[test]
    fn permute_moves_wires() {
        let s = PureState::from_bits("110").unwrap();
        let p = s.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p, PureState::from_bits("011").unwrap());
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(PureState::normalized(vec![c(0.0, 0.0); 2]).is_err());
        assert!(PureState::new(vec![c(1.0, 0.0); 3]).is_err());
    }

    proptest! {
        #[test]
        fn permutation_round_trip(seed in any::<u64>(), n in 1usize..=5) {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            use rand::Rng;
            let amps: Vec<C64> = (0..1 << n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let psi = PureState::normalized(amps).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            use rand::seq::SliceRandom;
            order.shuffle(&mut rng);
            let mut inverse = vec![0; n];
            for (i, &o) in order.iter().enumerate() { inverse[o] = i; }
            let back = psi.permute(&order).unwrap().permute(&inverse).unwrap();
            prop_assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-14);
        }
    }
}
