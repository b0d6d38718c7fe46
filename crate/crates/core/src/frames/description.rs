use serde::{Deserialize, Serialize};

use super::network::{oracle_access, Network, PartyId};
use crate::error::{input, Error, Result};
use crate::qmath::{Operator, PureState, Su2, STRUCT_TOL};

/// A multi-qubit state written entirely in `owner`'s basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalDescription {
    pub owner: PartyId,
    pub state: PureState,
    /// One label per wire, naming the physical qubit.
    pub wires: Vec<String>,
}

impl LocalDescription {
    pub fn new(owner: PartyId, state: PureState) -> Self {
        let wires = (0..state.n_qubits()).map(|i| format!("q{i}")).collect();
        Self { owner, state, wires }
    }

    pub fn with_labels(owner: PartyId, state: PureState, wires: Vec<String>) -> Result<Self> {
        if wires.len() != state.n_qubits() {
            return input("one label per wire is required");
        }
        Ok(Self { owner, state, wires })
    }

    pub fn wire_index(&self, label: &str) -> Result<usize> {
        self.wires
            .iter()
            .position(|w| w == label)
            .ok_or_else(|| Error::Input(format!("no wire labeled {label:?}")))
    }

    /// Fiducial-basis representation. Ground truth.
    pub fn physical(&self, net: &Network) -> Result<PureState> {
        oracle_access("a fiducial-basis state")?;
        net.check_party(self.owner)?;
        let f = Operator::tensor_power(&net.frame_raw(self.owner), self.state.n_qubits());
        self.state.apply(&f)
    }
}

/// Sends `wire` from `sender` to `receiver`.
///
/// The receiver's description of the sent qubit is `V_{recv,send} R_{send,recv}`
/// applied to the sender's coefficients; every other wire is re-expressed in
/// the receiver's basis without physical change.
pub fn transmit(
    net: &Network,
    sender: PartyId,
    receiver: PartyId,
    desc: &LocalDescription,
    wire: usize,
) -> Result<LocalDescription> {
    oracle_access("description transport")?;
    net.check_party(sender)?;
    net.check_party(receiver)?;
    if desc.owner != sender {
        return Err(Error::ProtocolViolation(format!(
            "{sender} cannot send a qubit described by {}",
            desc.owner
        )));
    }
    if wire >= desc.state.n_qubits() {
        return input(format!("wire {wire} is not part of the description"));
    }
    if sender == receiver {
        return input("sender and receiver must differ");
    }
    let rebase = net.frame_raw(receiver).adjoint() * net.frame_raw(sender);
    let carried = net.link(receiver, sender);
    let ops: Vec<Su2> = (0..desc.state.n_qubits())
        .map(|w| if w == wire { carried } else { rebase })
        .collect();
    Ok(LocalDescription {
        owner: receiver,
        state: desc.state.apply(&Operator::product(&ops))?,
        wires: desc.wires.clone(),
    })
}

/// Applies `gate`, written in the owner's basis, to `wires`.
pub fn apply_local(desc: &LocalDescription, gate: &Operator, wires: &[usize]) -> Result<LocalDescription> {
    if !gate.is_unitary(STRUCT_TOL) {
        return input("local gate must be unitary");
    }
    Ok(LocalDescription {
        owner: desc.owner,
        state: desc.state.apply_on(gate, wires)?,
        wires: desc.wires.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{FrameRestriction, ALICE, BOB};
    use crate::qmath::{c, equal_up_to_phase};

    fn singlet() -> PureState {
        PureState::superposition(&[(c(1.0, 0.0), "01"), (c(-1.0, 0.0), "10")]).unwrap()
    }

    #[test]
    fn trivial_network_is_transparent() {
        let net = Network::trivial(2).unwrap();
        let psi = PureState::superposition(&[(c(0.6, 0.0), "0"), (c(0.0, 0.8), "1")]).unwrap();
        let out = transmit(&net, ALICE, BOB, &LocalDescription::new(ALICE, psi.clone()), 0).unwrap();
        assert_eq!(out.owner, BOB);
        assert!((out.state.amplitudes() - psi.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn transmitted_singlet_half_matches_ebit_form() {
        // (I ⊗ V_lk R_kl)(|0_k 1_l⟩ − |1_k 0_l⟩)/√2 built in fiducial coordinates.
        let net = Network::build(31, 2, FrameRestriction::Full).unwrap();
        let (k, l) = (ALICE, BOB);
        let sent = transmit(&net, k, l, &LocalDescription::new(k, singlet()), 1).unwrap();
        let fk = Operator::from_su2(&net.frame(k).unwrap());
        let fl = Operator::from_su2(&net.frame(l).unwrap());
        let ket = |f: &Operator, b: usize| PureState::basis(1, b).apply(f).unwrap();
        let mixed = PureState::combine(&[
            (c(1.0, 0.0), &ket(&fk, 0).kron(&ket(&fl, 1))),
            (c(-1.0, 0.0), &ket(&fk, 1).kron(&ket(&fl, 0))),
        ])
        .unwrap();
        let dressing = Operator::identity(1).kron(&Operator::from_su2(
            &(net.channel(l, k).unwrap() * net.relative_frame(k, l).unwrap()),
        ));
        let want = mixed.apply(&dressing).unwrap();
        assert!(equal_up_to_phase(&sent.physical(&net).unwrap(), &want, 1e-12).unwrap());
    }

    #[test]
    fn round_trip_applies_loop_product() {
        let net = Network::build(32, 2, FrameRestriction::Full).unwrap();
        let psi = PureState::superposition(&[(c(0.6, 0.0), "0"), (c(0.0, 0.8), "1")]).unwrap();
        let there = transmit(&net, ALICE, BOB, &LocalDescription::new(ALICE, psi.clone()), 0).unwrap();
        let back = transmit(&net, BOB, ALICE, &there, 0).unwrap();
        let fa = net.frame(ALICE).unwrap();
        let hol = fa.adjoint() * net.channel(ALICE, BOB).unwrap() * net.channel(BOB, ALICE).unwrap() * fa;
        let want = psi.apply_su2(&hol, 0).unwrap();
        assert!((back.state.amplitudes() - want.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn preserves_global_state_up_to_channel() {
        let net = Network::build(33, 3, FrameRestriction::Full).unwrap();
        let psi = PureState::normalized((0..8).map(|i| c(i as f64 - 3.0, 0.5 * i as f64)).collect()).unwrap();
        let desc = LocalDescription::new(ALICE, psi);
        let before = desc.physical(&net).unwrap();
        let after = transmit(&net, ALICE, crate::frames::CHARLIE, &desc, 1).unwrap();
        let undone = after
            .physical(&net)
            .unwrap()
            .apply_su2(&net.channel(crate::frames::CHARLIE, ALICE).unwrap().adjoint(), 1)
            .unwrap();
        assert!((before.overlap(&undone).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn owner_mismatch_is_a_violation() {
        let net = Network::build(34, 2, FrameRestriction::Full).unwrap();
        let desc = LocalDescription::new(BOB, singlet());
        assert!(matches!(
            transmit(&net, ALICE, BOB, &desc, 0),
            Err(Error::ProtocolViolation(_))
        ));
    }

    #[test]
    fn local_gates() {
        let zero = LocalDescription::new(ALICE, PureState::from_bits("0").unwrap());
        let flipped = apply_local(&zero, &Operator::from_su2(&Su2::pauli_x()), &[0]).unwrap();
        assert!(equal_up_to_phase(&flipped.state, &PureState::from_bits("1").unwrap(), 1e-12).unwrap());
        let same = apply_local(&zero, &Operator::identity(1), &[0]).unwrap();
        assert_eq!(same, zero);
        let u = Operator::from_su2(&Su2::from_rotation_vector([0.3, -1.1, 0.4]));
        let there = apply_local(&flipped, &u, &[0]).unwrap();
        let back = apply_local(&there, &u.adjoint(), &[0]).unwrap();
        assert!((back.state.amplitudes() - flipped.state.amplitudes()).norm() < 1e-12);
        let bad = Operator::identity(1).scale(c(2.0, 0.0));
        assert!(apply_local(&zero, &bad, &[0]).is_err());
    }
}
