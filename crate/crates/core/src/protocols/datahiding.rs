use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tv_distance;
use crate::error::{Error, Result};
use crate::frames::{Event, Lab, Network, PartyId, ALICE, BOB, CHARLIE};
use crate::invariants::{bell, invariant_povms, povm2_singlet_triplet, Bell};
use crate::qmath::{c, PureState};

/// Below this a probability is treated as zero when deciding.
const DECIDE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenBit {
    Plus,
    Minus,
}

impl HiddenBit {
    pub const ALL: [HiddenBit; 2] = [HiddenBit::Plus, HiddenBit::Minus];
}

/// Which pair of Bell states carries the bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HidingPair {
    /// `(|01⟩ ± |10⟩)/√2`: a triplet and the singlet.
    #[default]
    SingletTriplet,
    /// `β_x` for `+`, `β_y` for `−`: two triplets.
    TwoTriplets,
}

impl HidingPair {
    fn state(self, bit: HiddenBit) -> PureState {
        match (self, bit) {
            (HidingPair::SingletTriplet, HiddenBit::Plus) => bell(Bell::Z),
            (HidingPair::SingletTriplet, HiddenBit::Minus) => bell(Bell::Zero),
            (HidingPair::TwoTriplets, HiddenBit::Plus) => bell(Bell::X),
            (HidingPair::TwoTriplets, HiddenBit::Minus) => bell(Bell::Y),
        }
    }
}

/// The two refbits Charlie hands out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefbitConfig {
    /// `(|0⟩+|1⟩)/√2` to both.
    SameState,
    /// `(|0⟩+|1⟩)/√2` to Alice, `(|0⟩−|1⟩)/√2` to Bob.
    Orthogonal,
}

impl RefbitConfig {
    pub const ALL: [RefbitConfig; 2] = [RefbitConfig::SameState, RefbitConfig::Orthogonal];

    /// The bit a double singlet identifies.
    pub fn identifies(self) -> HiddenBit {
        match self {
            RefbitConfig::SameState => HiddenBit::Plus,
            RefbitConfig::Orthogonal => HiddenBit::Minus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unlocked {
    Bit(HiddenBit),
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefbitOutcome {
    ConclusivePlus,
    ConclusiveMinus,
    Inconclusive,
}

/// Charlie's hidden bit as held by Alice (wire 0) and Bob (wire 1), and
/// their refbits on wires 2 and 3 when handed out.
#[derive(Clone)]
pub struct DataHidingInstance<'n> {
    pub hider: PartyId,
    pub bit: HiddenBit,
    pub pair: HidingPair,
    pub refbits: Option<RefbitConfig>,
    lab: Lab<'n>,
}

impl<'n> DataHidingInstance<'n> {
    pub fn lab(&self) -> &Lab<'n> {
        &self.lab
    }

    /// Charlie prepares two refbits per `config` and sends one to each.
    pub fn with_refbits(mut self, config: RefbitConfig) -> Result<Self> {
        if self.refbits.is_some() {
            return Err(Error::State("refbits already handed out".into()));
        }
        let plus = PureState::superposition(&[(c(1.0, 0.0), "0"), (c(1.0, 0.0), "1")])?;
        let minus = PureState::superposition(&[(c(1.0, 0.0), "0"), (c(-1.0, 0.0), "1")])?;
        let (for_alice, for_bob) = match config {
            RefbitConfig::SameState => (plus.clone(), plus),
            RefbitConfig::Orthogonal => (plus, minus),
        };
        self.lab.protocol_scope(|lab| -> Result<()> {
            let mut charlie = lab.party(CHARLIE)?;
            let ra = charlie.prepare(&for_alice)?;
            charlie.send(ra[0], ALICE)?;
            let rb = charlie.prepare(&for_bob)?;
            charlie.send(rb[0], BOB)
        })?;
        self.refbits = Some(config);
        Ok(self)
    }

    pub fn transcript(&self) -> &[Event] {
        self.lab.transcript()
    }
}

/// Charlie prepares the chosen state and sends one qubit to each of Alice
/// and Bob.
pub fn hide_bit(net: &Network, bit: HiddenBit, pair: HidingPair) -> Result<DataHidingInstance<'_>> {
    if net.party_count() < 3 {
        return crate::error::input("data hiding needs three parties");
    }
    let mut lab = Lab::new(net);
    lab.protocol_scope(|lab| -> Result<()> {
        let mut charlie = lab.party(CHARLIE)?;
        let w = charlie.prepare(&pair.state(bit))?;
        charlie.send(w[0], ALICE)?;
        charlie.send(w[1], BOB)
    })?;
    Ok(DataHidingInstance {
        hider: CHARLIE,
        bit,
        pair,
        refbits: None,
        lab,
    })
}

/// Result of the forwarding unlock.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForwardingReport {
    /// Alice's exact probability of `singlet` after the correction.
    pub p_singlet: f64,
    pub outcome: Unlocked,
    pub transcript: Vec<Event>,
}

/// Bob forwards his qubit to Alice, who undoes the relative holonomy of
/// the two routes from Charlie and tests singlet against triplet.
fn forward_and_correct<'n>(inst: &DataHidingInstance<'n>) -> Result<Lab<'n>> {
    let mut lab = inst.lab.clone();
    lab.protocol_scope(|lab| -> Result<()> {
        lab.party(BOB)?.send(1, ALICE)?;
        let mut alice = lab.party(ALICE)?;
        let direct = alice.holonomy(&[ALICE, CHARLIE, ALICE])?;
        let via_bob = alice.holonomy(&[ALICE, CHARLIE, BOB, ALICE])?;
        alice.apply_su2(&(direct * via_bob.adjoint()), 1)
    })?;
    Ok(lab)
}

fn decide_forwarded(pair: HidingPair, singlet: bool) -> Unlocked {
    match (pair, singlet) {
        (HidingPair::TwoTriplets, _) => Unlocked::Indeterminate,
        (HidingPair::SingletTriplet, true) => Unlocked::Bit(HiddenBit::Minus),
        (HidingPair::SingletTriplet, false) => Unlocked::Bit(HiddenBit::Plus),
    }
}

/// Exact forwarding unlock. The bit is declared only when the outcome is
/// certain; a hidden pair of two triplets is always indeterminate.
pub fn unlock_by_forwarding(inst: &DataHidingInstance<'_>) -> Result<ForwardingReport> {
    let mut lab = forward_and_correct(inst)?;
    let p = lab.protocol_scope(|lab| lab.party(ALICE)?.probabilities(&povm2_singlet_triplet(), &[0, 1]))?;
    let p_singlet = p[0];
    let outcome = if p_singlet > 1.0 - DECIDE_TOL {
        decide_forwarded(inst.pair, true)
    } else if p_singlet < DECIDE_TOL {
        decide_forwarded(inst.pair, false)
    } else {
        Unlocked::Indeterminate
    };
    Ok(ForwardingReport {
        p_singlet,
        outcome,
        transcript: lab.into_transcript(),
    })
}

/// Forwarding unlock with a sampled measurement.
pub fn unlock_by_forwarding_sampled<R: Rng + ?Sized>(inst: &DataHidingInstance<'_>, rng: &mut R) -> Result<Unlocked> {
    let mut lab = forward_and_correct(inst)?;
    let k = lab.protocol_scope(|lab| lab.party(ALICE)?.measure(&povm2_singlet_triplet(), &[0, 1], rng))?;
    Ok(decide_forwarded(inst.pair, k == 0))
}

/// Exact outcome distribution of the refbit unlock.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefbitReport {
    pub config: RefbitConfig,
    pub p_both_singlet: f64,
    pub distribution: Vec<(RefbitOutcome, f64)>,
}

fn refbit_wires(inst: &DataHidingInstance<'_>) -> Result<RefbitConfig> {
    inst.refbits
        .ok_or_else(|| Error::State("no refbits have been handed out".into()))
}

fn conclusive(config: RefbitConfig) -> RefbitOutcome {
    match config.identifies() {
        HiddenBit::Plus => RefbitOutcome::ConclusivePlus,
        HiddenBit::Minus => RefbitOutcome::ConclusiveMinus,
    }
}

/// Alice tests her hidden qubit with her refbit, Bob likewise; a double
/// singlet identifies the bit the configuration points to.
pub fn unlock_with_refbits(inst: &DataHidingInstance<'_>) -> Result<RefbitReport> {
    let config = refbit_wires(inst)?;
    let povm = povm2_singlet_triplet();
    let mut lab = inst.lab.clone();
    let p_both = lab.protocol_scope(|lab| -> Result<f64> {
        let mut total = 0.0;
        for branch in lab.party(ALICE)?.branches(&povm, &[0, 2])? {
            if branch.outcome != 0 {
                continue;
            }
            let mut after = branch.lab;
            let pb = after.party(BOB)?.probabilities(&povm, &[1, 3])?;
            total += branch.probability * pb[0];
        }
        Ok(total)
    })?;
    Ok(RefbitReport {
        config,
        p_both_singlet: p_both,
        distribution: vec![(conclusive(config), p_both), (RefbitOutcome::Inconclusive, 1.0 - p_both)],
    })
}

/// Refbit unlock with sampled measurements.
pub fn unlock_with_refbits_sampled<R: Rng + ?Sized>(inst: &DataHidingInstance<'_>, rng: &mut R) -> Result<RefbitOutcome> {
    let config = refbit_wires(inst)?;
    let povm = povm2_singlet_triplet();
    let mut lab = inst.lab.clone();
    lab.protocol_scope(|lab| -> Result<RefbitOutcome> {
        let a = lab.party(ALICE)?.measure(&povm, &[0, 2], rng)?;
        let b = lab.party(BOB)?.measure(&povm, &[1, 3], rng)?;
        Ok(if a == 0 && b == 0 {
            conclusive(config)
        } else {
            RefbitOutcome::Inconclusive
        })
    })
}

/// Exact success probability with the bit and the refbit configuration
/// drawn independently, the configuration `SameState` with probability
/// `p_same`. Success means a conclusive outcome naming the right bit.
pub fn refbit_success_probability(net: &Network, p_same: f64) -> Result<f64> {
    let mut total = 0.0;
    for bit in HiddenBit::ALL {
        for config in RefbitConfig::ALL {
            let weight = 0.5 * if config == RefbitConfig::SameState { p_same } else { 1.0 - p_same };
            let inst = hide_bit(net, bit, HidingPair::SingletTriplet)?.with_refbits(config)?;
            let report = unlock_with_refbits(&inst)?;
            let right = match bit {
                HiddenBit::Plus => RefbitOutcome::ConclusivePlus,
                HiddenBit::Minus => RefbitOutcome::ConclusiveMinus,
            };
            let p: f64 = report.distribution.iter().filter(|(o, _)| *o == right).map(|(_, p)| p).sum();
            total += weight * p;
        }
    }
    Ok(total)
}

/// Largest total-variation distance between the two bits' outcome
/// distributions, over every invariant POVM each receiving party can apply
/// to the wires they hold before unlocking.
pub fn hiding_gap(net: &Network, pair: HidingPair, refbits: Option<RefbitConfig>) -> Result<f64> {
    let build = |bit| -> Result<DataHidingInstance<'_>> {
        let inst = hide_bit(net, bit, pair)?;
        match refbits {
            Some(cfg) => inst.with_refbits(cfg),
            None => Ok(inst),
        }
    };
    let mut plus = build(HiddenBit::Plus)?;
    let mut minus = build(HiddenBit::Minus)?;
    let mut worst: f64 = 0.0;
    for party in [ALICE, BOB] {
        let wires = plus.lab.wires_of(party);
        for povm in invariant_povms(wires.len())? {
            let p = plus.lab.protocol_scope(|lab| lab.party(party)?.probabilities(&povm, &wires))?;
            let q = minus.lab.protocol_scope(|lab| lab.party(party)?.probabilities(&povm, &wires))?;
            worst = worst.max(tv_distance(&p, &q));
        }
    }
    Ok(worst)
}
