use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::frames::{Event, Lab, Network, ALICE, BOB};
use crate::invariants::{bell, povm2_singlet_triplet, povm4_invariant, Bell};
use crate::qmath::{PureState, Su2};

/// Alice's encoding operation on her half of the ebit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operation {
    I,
    X,
    Y,
    Z,
}

impl Operation {
    pub const ALL: [Operation; 4] = [Operation::I, Operation::X, Operation::Y, Operation::Z];

    fn gate(self) -> Su2 {
        match self {
            Operation::I => Su2::identity(),
            Operation::X => Su2::pauli_x(),
            Operation::Y => Su2::pauli_y(),
            Operation::Z => Su2::pauli_z(),
        }
    }
}

/// What Alice sends along besides her half of the ebit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceLevel {
    #[default]
    None,
    /// A `β_x` pair prepared by Alice.
    EntangledPair,
    /// Two refbits, both `|0⟩` in Alice's basis.
    TwoRefbits,
}

/// A distribution over Alice's operations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strategy(pub Vec<(Operation, f64)>);

impl Strategy {
    /// `I` half the time, `Z` a quarter, `X` and `Y` an eighth each.
    pub fn reference() -> Self {
        Self(vec![
            (Operation::I, 0.5),
            (Operation::Z, 0.25),
            (Operation::X, 0.125),
            (Operation::Y, 0.125),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        if self.0.iter().any(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
            return input("strategy weights must be nonnegative");
        }
        let total: f64 = self.0.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return input(format!("strategy weights sum to {total}, not 1"));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Operation {
        let mut draw = rng.random::<f64>();
        for &(op, p) in &self.0 {
            if draw < p {
                return op;
            }
            draw -= p;
        }
        self.0.last().expect("non-empty strategy").0
    }
}

impl Default for Strategy {
    fn default() -> Self {
        Self::reference()
    }
}

/// Bob's view of one round: a singlet means `I`, `phi_01` excludes `Z`
/// (and, with the `β_x` pair, `Y` too).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobOutcome {
    Singlet,
    Phi01,
    OtherTriplet,
}

/// Exact outcome probabilities of one round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub operation: Operation,
    pub resource: ResourceLevel,
    pub p_singlet: f64,
    pub p_phi01: f64,
    pub p_other: f64,
    pub transcript: Vec<Event>,
}

/// Bob's four (or two) wires: ebit halves first, then the resource.
fn deliver(net: &Network, op: Operation, resource: ResourceLevel) -> Result<Lab<'_>> {
    let mut lab = Lab::new(net);
    lab.protocol_scope(|lab| -> Result<()> {
        let mut alice = lab.party(ALICE)?;
        let ebit = alice.prepare(&bell(Bell::Zero))?;
        alice.send(ebit[1], BOB)?;
        let extra = match resource {
            ResourceLevel::None => None,
            ResourceLevel::EntangledPair => Some(bell(Bell::X)),
            ResourceLevel::TwoRefbits => Some(PureState::from_bits("00")?),
        };
        if let Some(state) = extra {
            for w in alice.prepare(&state)? {
                alice.send(w, BOB)?;
            }
        }
        alice.apply_su2(&op.gate(), ebit[0])?;
        alice.send(ebit[0], BOB)
    })?;
    Ok(lab)
}

/// One round with exact probabilities.
pub fn superdense_round(net: &Network, op: Operation, resource: ResourceLevel) -> Result<RoundRecord> {
    let mut lab = deliver(net, op, resource)?;
    let (p_singlet, p_phi01) = lab.protocol_scope(|lab| -> Result<(f64, f64)> {
        let mut p_singlet = 0.0;
        let mut p_phi01 = 0.0;
        for branch in lab.party(BOB)?.branches(&povm2_singlet_triplet(), &[0, 1])? {
            if branch.outcome == 0 {
                p_singlet = branch.probability;
            } else if resource != ResourceLevel::None {
                let mut after = branch.lab;
                let p = after.party(BOB)?.probabilities(&povm4_invariant(), &[0, 1, 2, 3])?;
                p_phi01 = branch.probability * p[1];
            }
        }
        Ok((p_singlet, p_phi01))
    })?;
    Ok(RoundRecord {
        operation: op,
        resource,
        p_singlet,
        p_phi01,
        p_other: (1.0 - p_singlet - p_phi01).max(0.0),
        transcript: lab.into_transcript(),
    })
}

/// One round with sampled measurements.
pub fn superdense_round_sampled<R: Rng + ?Sized>(
    net: &Network,
    op: Operation,
    resource: ResourceLevel,
    rng: &mut R,
) -> Result<BobOutcome> {
    let mut lab = deliver(net, op, resource)?;
    lab.protocol_scope(|lab| -> Result<BobOutcome> {
        let mut bob = lab.party(BOB)?;
        if bob.measure(&povm2_singlet_triplet(), &[0, 1], rng)? == 0 {
            return Ok(BobOutcome::Singlet);
        }
        if resource == ResourceLevel::None {
            return Ok(BobOutcome::OtherTriplet);
        }
        Ok(if bob.measure(&povm4_invariant(), &[0, 1, 2, 3], rng)? == 1 {
            BobOutcome::Phi01
        } else {
            BobOutcome::OtherTriplet
        })
    })
}

/// Event probabilities under a strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    /// Bob learns one bit: the singlet outcome.
    pub one_bit: f64,
    /// Bob learns two bits: `phi_01` after Alice used `X` or `Y`.
    pub two_bit: f64,
    pub per_operation: Vec<RoundRecord>,
}

pub fn strategy_summary(net: &Network, strategy: &Strategy, resource: ResourceLevel) -> Result<StrategySummary> {
    strategy.validate()?;
    let mut one_bit = 0.0;
    let mut two_bit = 0.0;
    let mut per_operation = Vec::new();
    for &(op, w) in &strategy.0 {
        let r = superdense_round(net, op, resource)?;
        one_bit += w * r.p_singlet;
        if matches!(op, Operation::X | Operation::Y) {
            two_bit += w * r.p_phi01;
        }
        per_operation.push(r);
    }
    Ok(StrategySummary {
        one_bit,
        two_bit,
        per_operation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::FrameRestriction;
    use crate::seeding;

    fn nets() -> Vec<Network> {
        (0..10).map(|s| Network::build(s, 2, FrameRestriction::Full).unwrap()).collect()
    }

    #[test]
    fn without_resources_only_the_singlet_is_recognized() {
        for net in nets() {
            for op in Operation::ALL {
                let r = superdense_round(&net, op, ResourceLevel::None).unwrap();
                let want = if op == Operation::I { 1.0 } else { 0.0 };
                assert!((r.p_singlet - want).abs() < 1e-12);
                assert_eq!(r.p_phi01, 0.0);
            }
        }
    }

    #[test]
    fn beta_x_pair_singles_out_x() {
        for net in nets() {
            let p = |op| superdense_round(&net, op, ResourceLevel::EntangledPair).unwrap().p_phi01;
            assert!((p(Operation::X) - 1.0 / 3.0).abs() < 1e-12);
            assert!(p(Operation::Y).abs() < 1e-12);
            assert!(p(Operation::Z).abs() < 1e-12);
            assert!(p(Operation::I).abs() < 1e-12);
        }
    }

    #[test]
    fn two_refbits_exclude_z() {
        for net in nets() {
            let p = |op| superdense_round(&net, op, ResourceLevel::TwoRefbits).unwrap().p_phi01;
            assert!((p(Operation::X) - 1.0 / 6.0).abs() < 1e-12);
            assert!((p(Operation::Y) - 1.0 / 6.0).abs() < 1e-12);
            assert!(p(Operation::Z).abs() < 1e-12);
            let s = strategy_summary(&net, &Strategy::reference(), ResourceLevel::TwoRefbits).unwrap();
            assert!((s.one_bit - 0.5).abs() < 1e-12);
            assert!((s.two_bit - 1.0 / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_rounds_match_exact_support() {
        let net = Network::build(3, 2, FrameRestriction::Full).unwrap();
        let mut rng = seeding::master(8);
        for _ in 0..50 {
            let z = superdense_round_sampled(&net, Operation::Z, ResourceLevel::TwoRefbits, &mut rng).unwrap();
            assert_eq!(z, BobOutcome::OtherTriplet);
            let i = superdense_round_sampled(&net, Operation::I, ResourceLevel::TwoRefbits, &mut rng).unwrap();
            assert_eq!(i, BobOutcome::Singlet);
        }
    }

    #[test]
    fn strategy_must_be_a_distribution() {
        assert!(Strategy(vec![(Operation::I, 0.5)]).validate().is_err());
        assert!(Strategy(vec![(Operation::I, 1.5), (Operation::X, -0.5)]).validate().is_err());
        assert!(Strategy::reference().validate().is_ok());
    }
}
