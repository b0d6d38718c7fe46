use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::frames::{Lab, Network, PartyId};
use crate::invariants::{bell, Bell, Povm};
use crate::qmath::{Operator, PureState, Su2};

/// Which GHZ-like form a variant is in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzDressing {
    /// Outcome 0 after the maker's flip: the channel-dressed GHZ state.
    Standard,
    /// Outcome 1, uncorrected: `|010⟩ + |101⟩` under the dressing.
    Outcome1,
    /// Outcome 1 after the first recipient's flip.
    FirstRecipientFlip,
    /// Outcome 1 after the maker and the second recipient both flip.
    MakerAndSecondFlip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corrector {
    Bob,
    AliceAndCharlie,
}

/// Three-party state held as (maker, first recipient, second recipient).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzVariant {
    pub maker: PartyId,
    pub recipients: (PartyId, PartyId),
    /// The maker's measurement result on the CNOT target.
    pub outcome: usize,
    pub dressing: GhzDressing,
    /// Probability of the measurement branch this variant came from.
    pub probability: f64,
    /// Holder-basis coefficients.
    pub state: PureState,
}

impl GhzVariant {
    fn holders(&self) -> Vec<PartyId> {
        vec![self.maker, self.recipients.0, self.recipients.1]
    }
}

/// Two singlets from `a` (to `b` and to `c`), then the CNOT. Wires are
/// `a1, b, a2, c`.
fn entangle<'n>(net: &'n Network, a: PartyId, b: PartyId, c: PartyId) -> Result<Lab<'n>> {
    if a == b || a == c || b == c {
        return input("GHZ construction needs three distinct parties");
    }
    let mut lab = Lab::new(net);
    lab.protocol_scope(|lab| -> Result<()> {
        let mut alice = lab.party(a)?;
        let first = alice.prepare(&bell(Bell::Zero))?;
        alice.send(first[1], b)?;
        let second = alice.prepare(&bell(Bell::Zero))?;
        alice.send(second[1], c)?;
        alice.apply(&Operator::cnot(), &[first[0], second[0]])
    })?;
    Ok(lab)
}

/// Finishes a measured branch: flips the maker's qubit on outcome 0 and
/// drops the measured wire.
fn finish(mut lab: Lab<'_>, a: PartyId, b: PartyId, c: PartyId, outcome: usize, probability: f64) -> Result<GhzVariant> {
    let dressing = if outcome == 0 {
        lab.protocol_scope(|lab| lab.party(a)?.apply_su2(&Su2::pauli_x(), 0))?;
        GhzDressing::Standard
    } else {
        GhzDressing::Outcome1
    };
    Ok(GhzVariant {
        maker: a,
        recipients: (b, c),
        outcome,
        dressing,
        probability,
        state: lab.holder_view()?.fix_wire(2, outcome)?,
    })
}

/// Both measurement branches with their exact probabilities.
pub fn ghz_branches(net: &Network, a: PartyId, b: PartyId, c: PartyId) -> Result<Vec<GhzVariant>> {
    let mut lab = entangle(net, a, b, c)?;
    let branches = lab.protocol_scope(|lab| lab.party(a)?.branches(&Povm::standard_basis(1), &[2]))?;
    branches
        .into_iter()
        .map(|br| finish(br.lab, a, b, c, br.outcome, br.probability))
        .collect()
}

/// One sampled run of the construction.
pub fn ghz_from_singlets<R: Rng + ?Sized>(
    net: &Network,
    a: PartyId,
    b: PartyId,
    c: PartyId,
    rng: &mut R,
) -> Result<GhzVariant> {
    let mut lab = entangle(net, a, b, c)?;
    let povm = Povm::standard_basis(1);
    let outcome = lab.protocol_scope(|lab| lab.party(a)?.measure(&povm, &[2], rng))?;
    let probability = lab.transcript().last().and_then(|e| e.probability).unwrap_or(0.0);
    finish(lab, a, b, c, outcome, probability)
}

/// Turns an outcome-1 variant into a GHZ form by bit flips.
pub fn correct_outcome1(net: &Network, variant: &GhzVariant, who: Corrector) -> Result<GhzVariant> {
    if variant.dressing != GhzDressing::Outcome1 {
        return input("only the uncorrected outcome-1 state can be corrected");
    }
    let mut lab = Lab::from_holder_state(net, &variant.state, variant.holders())?;
    let (b, c) = variant.recipients;
    let x = Su2::pauli_x();
    let dressing = lab.protocol_scope(|lab| -> Result<GhzDressing> {
        match who {
            Corrector::Bob => {
                lab.party(b)?.apply_su2(&x, 1)?;
                Ok(GhzDressing::FirstRecipientFlip)
            }
            Corrector::AliceAndCharlie => {
                lab.party(variant.maker)?.apply_su2(&x, 0)?;
                lab.party(c)?.apply_su2(&x, 2)?;
                Ok(GhzDressing::MakerAndSecondFlip)
            }
        }
    })?;
    Ok(GhzVariant {
        dressing,
        state: lab.holder_view()?,
        ..variant.clone()
    })
}

/// `(I ⊗ W L_BA W† ⊗ L_CA)(|000⟩+|111⟩)/√2` in holder bases: the GHZ state
/// with the first recipient's leg conjugated by `w`. Ground truth.
pub fn dressed_ghz(net: &Network, a: PartyId, b: PartyId, c: PartyId, w: &Su2) -> Result<PureState> {
    crate::frames::oracle_access("channel-dressed GHZ states")?;
    let ghz = PureState::superposition(&[(crate::qmath::c(1.0, 0.0), "000"), (crate::qmath::c(1.0, 0.0), "111")])?;
    let legs = [Su2::identity(), *w * net.link(b, a) * w.adjoint(), net.link(c, a)];
    ghz.apply(&Operator::product(&legs))
}
