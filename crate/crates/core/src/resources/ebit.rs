use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::frames::{Lab, Network, PartyId};
use crate::invariants::{bell, Bell};
use crate::qmath::{PureState, Su2};

/// Which of the two parties made the pair and sent one half across.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EbitForm {
    /// Made by the first holder, second half sent over the channel.
    Direct,
    /// Made by the second holder, first half sent over the channel.
    Reversed,
}

/// A Bell pair shared by `holders.0` (wire 0) and `holders.1` (wire 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EbitSpec {
    pub maker: PartyId,
    pub holders: (PartyId, PartyId),
    pub form: EbitForm,
    pub class: Bell,
    /// Holder-basis coefficients.
    pub state: PureState,
}

impl EbitSpec {
    fn lab<'n>(&self, net: &'n Network) -> Result<Lab<'n>> {
        Lab::from_holder_state(net, &self.state, vec![self.holders.0, self.holders.1])
    }
}

fn pauli_gate(j: Bell) -> Su2 {
    match j {
        Bell::Zero => Su2::identity(),
        Bell::X => Su2::pauli_x(),
        Bell::Y => Su2::pauli_y(),
        Bell::Z => Su2::pauli_z(),
    }
}

/// `maker` prepares `β_class` in their own basis and sends the second qubit
/// to `to`.
pub fn make_ebit(net: &Network, maker: PartyId, to: PartyId, class: Bell) -> Result<EbitSpec> {
    if maker == to {
        return input("an ebit needs two distinct parties");
    }
    let mut lab = Lab::new(net);
    lab.protocol_scope(|lab| -> Result<()> {
        let w = lab.party(maker)?.prepare(&bell(class))?;
        lab.party(maker)?.send(w[1], to)
    })?;
    Ok(EbitSpec {
        maker,
        holders: (maker, to),
        form: EbitForm::Direct,
        class,
        state: lab.holder_view()?,
    })
}

/// Re-expresses the pair in the other form through local operations.
///
/// The non-maker side applies the inverse of its own loop holonomy (to go
/// `Direct → Reversed`) or the holonomy itself (back). For triplet classes
/// the Pauli labelling the class is first removed by whoever made the pair
/// and then re-applied by the other holder. `by` is the party asked to do
/// the holonomy step; only the second holder knows that holonomy, so any
/// other choice fails with a protocol violation.
pub fn convert_ebit(net: &Network, spec: &EbitSpec, by: PartyId) -> Result<EbitSpec> {
    let (k, l) = spec.holders;
    let mut lab = spec.lab(net)?;
    let sigma = pauli_gate(spec.class);
    let (undo_wire, undo_party, redo_wire, redo_party) = match spec.form {
        EbitForm::Direct => (0, k, 1, l),
        EbitForm::Reversed => (1, l, 0, k),
    };
    lab.protocol_scope(|lab| -> Result<()> {
        lab.party(undo_party)?.apply_su2(&sigma.adjoint(), undo_wire)?;
        let h = lab.party(by)?.holonomy(&[l, k, l])?;
        let step = match spec.form {
            EbitForm::Direct => h.adjoint(),
            EbitForm::Reversed => h,
        };
        lab.party(by)?.apply_su2(&step, 1)?;
        lab.party(redo_party)?.apply_su2(&sigma, redo_wire)
    })?;
    Ok(EbitSpec {
        maker: spec.maker,
        holders: spec.holders,
        form: match spec.form {
            EbitForm::Direct => EbitForm::Reversed,
            EbitForm::Reversed => EbitForm::Direct,
        },
        class: spec.class,
        state: lab.holder_view()?,
    })
}

/// Changes the Bell class by a Pauli on the side that did not travel.
fn reclass(net: &Network, spec: &EbitSpec, target: Bell) -> Result<EbitSpec> {
    let mut lab = spec.lab(net)?;
    let (wire, party) = match spec.form {
        EbitForm::Direct => (0, spec.holders.0),
        EbitForm::Reversed => (1, spec.holders.1),
    };
    let gate = pauli_gate(target) * pauli_gate(spec.class).adjoint();
    lab.protocol_scope(|lab| lab.party(party)?.apply_su2(&gate, wire))?;
    Ok(EbitSpec {
        class: target,
        state: lab.holder_view()?,
        ..spec.clone()
    })
}

/// Every Bell pair `k` can make and `l` can reach from it, in both forms.
fn reachable(net: &Network, k: PartyId, l: PartyId) -> Result<Vec<EbitSpec>> {
    let mut out = Vec::new();
    for class in Bell::ALL {
        let direct = make_ebit(net, k, l, class)?;
        out.push(convert_ebit(net, &direct, l)?);
        out.push(direct);
    }
    Ok(out)
}

/// Largest infidelity `1 − |⟨target|converted⟩|` over all ordered pairs of
/// Bell classes and both forms, where `converted` is obtained from the
/// source by the allowed local steps and `target` is made directly.
pub fn ebit_classes_interconvert(net: &Network, k: PartyId, l: PartyId) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for from in Bell::ALL {
        for to in Bell::ALL {
            let source = make_ebit(net, k, l, from)?;
            let direct_target = make_ebit(net, k, l, to)?;
            let via_direct = reclass(net, &source, to)?;
            worst = worst.max(1.0 - via_direct.state.overlap(&direct_target.state)?);
            let reversed_target = convert_ebit(net, &direct_target, l)?;
            let via_reversed = reclass(net, &convert_ebit(net, &source, l)?, to)?;
            worst = worst.max(1.0 - via_reversed.state.overlap(&reversed_target.state)?);
        }
    }
    Ok(worst)
}

/// Best overlap between any reachable Bell pair and the singlet written
/// directly in the two holders' bases.
pub fn mixed_basis_singlet_overlap(net: &Network, k: PartyId, l: PartyId) -> Result<f64> {
    let target = bell(Bell::Zero);
    reachable(net, k, l)?
        .iter()
        .map(|s| s.state.overlap(&target))
        .try_fold(0.0, |m: f64, x| Ok(m.max(x?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{FrameRestriction, ALICE, BOB};
    use crate::qmath::{c, Operator};
    use crate::Error;

    /// `(I ⊗ V_lk R_kl)(|0_k 1_l⟩ − |1_k 0_l⟩)/√2` from ground truth, returned
    /// in holder bases.
    fn eq_direct(net: &Network, k: PartyId, l: PartyId) -> PureState {
        let fk = Operator::from_su2(&net.frame(k).unwrap());
        let fl = Operator::from_su2(&net.frame(l).unwrap());
        let ket = |f: &Operator, b: usize| PureState::basis(1, b).apply(f).unwrap();
        let mixed = PureState::combine(&[
            (c(1.0, 0.0), &ket(&fk, 0).kron(&ket(&fl, 1))),
            (c(-1.0, 0.0), &ket(&fk, 1).kron(&ket(&fl, 0))),
        ])
        .unwrap();
        let dress = net.channel(l, k).unwrap() * net.relative_frame(k, l).unwrap();
        let physical = mixed.apply(&Operator::identity(1).kron(&Operator::from_su2(&dress))).unwrap();
        physical.apply(&fk.adjoint().kron(&fl.adjoint())).unwrap()
    }

    /// `(V_kl R_lk ⊗ I)(|0_k 1_l⟩ − |1_k 0_l⟩)/√2` in holder bases.
    fn eq_reversed(net: &Network, k: PartyId, l: PartyId) -> PureState {
        let fk = Operator::from_su2(&net.frame(k).unwrap());
        let fl = Operator::from_su2(&net.frame(l).unwrap());
        let ket = |f: &Operator, b: usize| PureState::basis(1, b).apply(f).unwrap();
        let mixed = PureState::combine(&[
            (c(1.0, 0.0), &ket(&fk, 0).kron(&ket(&fl, 1))),
            (c(-1.0, 0.0), &ket(&fk, 1).kron(&ket(&fl, 0))),
        ])
        .unwrap();
        let dress = net.channel(k, l).unwrap() * net.relative_frame(l, k).unwrap();
        let physical = mixed.apply(&Operator::from_su2(&dress).kron(&Operator::identity(1))).unwrap();
        physical.apply(&fk.adjoint().kron(&fl.adjoint())).unwrap()
    }

    #[test]
    fn identity_network_shares_a_singlet() {
        let net = Network::trivial(2).unwrap();
        let e = make_ebit(&net, ALICE, BOB, Bell::Zero).unwrap();
        assert!((e.state.amplitudes() - bell(Bell::Zero).amplitudes()).norm() < 1e-15);
        let back = convert_ebit(&net, &e, BOB).unwrap();
        assert!((back.state.amplitudes() - e.state.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn matches_ground_truth_forms() {
        for seed in 0..20 {
            let net = Network::build(seed, 2, FrameRestriction::Full).unwrap();
            let e = make_ebit(&net, ALICE, BOB, Bell::Zero).unwrap();
            assert!(e.state.overlap(&eq_direct(&net, ALICE, BOB)).unwrap() > 1.0 - 1e-12);
            let r = convert_ebit(&net, &e, BOB).unwrap();
            assert_eq!(r.form, EbitForm::Reversed);
            assert!(r.state.overlap(&eq_reversed(&net, ALICE, BOB)).unwrap() > 1.0 - 1e-12);
            let d = convert_ebit(&net, &r, BOB).unwrap();
            assert!(d.state.overlap(&e.state).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn marginals_are_maximally_mixed() {
        let net = Network::build(5, 2, FrameRestriction::Full).unwrap();
        for class in Bell::ALL {
            let e = make_ebit(&net, ALICE, BOB, class).unwrap();
            let half = Operator::identity(1).scale(c(0.5, 0.0));
            for w in 0..2 {
                let rho = e.state.density().partial_trace(&[w]).unwrap();
                assert!(rho.operator().max_diff(&half) < 1e-12);
            }
        }
    }

    #[test]
    fn only_the_receiver_can_convert() {
        let net = Network::build(6, 2, FrameRestriction::Full).unwrap();
        let e = make_ebit(&net, ALICE, BOB, Bell::Zero).unwrap();
        assert!(matches!(convert_ebit(&net, &e, ALICE), Err(Error::ProtocolViolation(_))));
    }

    #[test]
    fn bell_classes_interconvert() {
        for seed in 0..10 {
            let net = Network::build(seed, 2, FrameRestriction::Full).unwrap();
            assert!(ebit_classes_interconvert(&net, ALICE, BOB).unwrap() < 1e-12);
        }
    }

    #[test]
    fn mixed_basis_singlet_out_of_reach() {
        let trivial = Network::trivial(2).unwrap();
        assert!(mixed_basis_singlet_overlap(&trivial, ALICE, BOB).unwrap() > 1.0 - 1e-12);
        for seed in 0..50 {
            let net = Network::build(seed, 2, FrameRestriction::Full).unwrap();
            assert!(mixed_basis_singlet_overlap(&net, ALICE, BOB).unwrap() < 1.0 - 1e-3);
        }
    }
}
