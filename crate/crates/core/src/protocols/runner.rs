//! JSON-configured protocol runs: exact probabilities, a Monte Carlo
//! cross-check, and an example transcript.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::commitment::{self, WireChoice};
use super::datahiding::{self, HiddenBit, HidingPair, RefbitConfig, RefbitOutcome, Unlocked};
use super::superdense::{self, BobOutcome, Operation, ResourceLevel, Strategy};
use super::tally;
use crate::error::{input, Result};
use crate::frames::{Event, FrameRestriction, Network};

/// Tolerance on exact values against the expected table.
pub const EXACT_TOL: f64 = 1e-12;
/// Sampled frequencies must sit within this many standard errors.
pub const SIGMA_BAND: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnlockMethod {
    #[default]
    Forwarding,
    Refbits,
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "snake_case")]
pub enum ProtocolConfig {
    DataHiding {
        #[serde(default)]
        pair: HidingPair,
        #[serde(default)]
        unlock: UnlockMethod,
        /// Probability that Charlie hands out equal refbits.
        #[serde(default = "half")]
        p_same_state: f64,
    },
    Superdense {
        #[serde(default)]
        resource: ResourceLevel,
        #[serde(default)]
        strategy: Strategy,
    },
    Commitment {
        #[serde(default)]
        cheat: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunnerConfig {
    pub network_seed: u64,
    /// Master seed of the Monte Carlo streams.
    #[serde(default)]
    pub seed: u64,
    pub trials: u64,
    #[serde(default)]
    pub restriction: FrameRestriction,
    #[serde(flatten)]
    pub protocol: ProtocolConfig,
}

impl RunnerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return input("trials must be at least 1");
        }
        match &self.protocol {
            ProtocolConfig::DataHiding { p_same_state, .. } if !(0.0..=1.0).contains(p_same_state) => {
                input("p_same_state must lie in [0, 1]")
            }
            ProtocolConfig::Superdense { strategy, .. } => strategy.validate(),
            _ => Ok(()),
        }
    }

    fn party_count(&self) -> usize {
        match self.protocol {
            ProtocolConfig::DataHiding { .. } => 3,
            _ => 2,
        }
    }
}

/// One reported number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub exact: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub pass: bool,
}

impl Quantity {
    pub fn exact(name: impl Into<String>, exact: f64, expected: Option<f64>) -> Self {
        let pass = expected.is_none_or(|e| (exact - e).abs() <= EXACT_TOL);
        Self {
            name: name.into(),
            exact,
            expected,
            empirical: None,
            trials: None,
            sigma: None,
            pass,
        }
    }

    /// Attaches a sampled frequency; it must sit within the band around the
    /// exact value, or match it outright when the exact value is 0 or 1.
    pub fn sampled(mut self, hits: u64, trials: u64) -> Self {
        let f = hits as f64 / trials as f64;
        let sigma = (self.exact * (1.0 - self.exact) / trials as f64).max(0.0).sqrt();
        let ok = if sigma == 0.0 {
            (f - self.exact).abs() <= EXACT_TOL
        } else {
            (f - self.exact).abs() <= SIGMA_BAND * sigma
        };
        self.empirical = Some(f);
        self.trials = Some(trials);
        self.sigma = Some(sigma);
        self.pass &= ok;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunnerConfig,
    pub quantities: Vec<Quantity>,
    pub transcript: Transcript,
    pub pass: bool,
}

pub fn run_json(text: &str) -> Result<RunSummary> {
    let cfg: RunnerConfig = serde_json::from_str(text)?;
    run(&cfg)
}

pub fn run(cfg: &RunnerConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let net = Network::build(cfg.network_seed, cfg.party_count(), cfg.restriction)?;
    let (quantities, events, what) = match &cfg.protocol {
        ProtocolConfig::DataHiding {
            pair,
            unlock: UnlockMethod::Forwarding,
            ..
        } => forwarding(&net, *pair, cfg)?,
        ProtocolConfig::DataHiding {
            pair,
            unlock: UnlockMethod::Refbits,
            p_same_state,
        } => refbits(&net, *pair, *p_same_state, cfg)?,
        ProtocolConfig::Superdense { resource, strategy } => dense(&net, *resource, strategy, cfg)?,
        ProtocolConfig::Commitment { cheat } => commitment(&net, *cheat, cfg)?,
    };
    let pass = quantities.iter().all(|q| q.pass);
    let verdict = if pass {
        format!("{what}: all checks passed")
    } else {
        let failed: Vec<&str> = quantities.iter().filter(|q| !q.pass).map(|q| q.name.as_str()).collect();
        format!("{what}: failed {}", failed.join(", "))
    };
    Ok(RunSummary {
        config: cfg.clone(),
        quantities,
        transcript: Transcript { events, verdict },
        pass,
    })
}

type Section = (Vec<Quantity>, Vec<Event>, &'static str);

fn bit_name(b: HiddenBit) -> &'static str {
    match b {
        HiddenBit::Plus => "plus",
        HiddenBit::Minus => "minus",
    }
}

fn random_bit<R: Rng + ?Sized>(rng: &mut R) -> HiddenBit {
    if rng.random::<bool>() {
        HiddenBit::Plus
    } else {
        HiddenBit::Minus
    }
}

fn forwarding(net: &Network, pair: HidingPair, cfg: &RunnerConfig) -> Result<Section> {
    let mut qs = Vec::new();
    let mut decided = 0.0;
    let mut events = Vec::new();
    for bit in HiddenBit::ALL {
        let inst = datahiding::hide_bit(net, bit, pair)?;
        let r = datahiding::unlock_by_forwarding(&inst)?;
        let p_correct = match bit {
            HiddenBit::Plus => 1.0 - r.p_singlet,
            HiddenBit::Minus => r.p_singlet,
        };
        let expected = match pair {
            HidingPair::SingletTriplet => Some(1.0),
            HidingPair::TwoTriplets => None,
        };
        qs.push(Quantity::exact(format!("forwarding_p_correct_{}", bit_name(bit)), p_correct, expected));
        if r.outcome != Unlocked::Indeterminate {
            decided += 0.5;
        }
        if events.is_empty() {
            events = r.transcript;
        }
    }
    let expected_decided = match pair {
        HidingPair::SingletTriplet => 1.0,
        HidingPair::TwoTriplets => 0.0,
    };
    let hits = tally(cfg.seed, cfg.trials, |rng| {
        let bit = random_bit(rng);
        let inst = datahiding::hide_bit(net, bit, pair)?;
        Ok([datahiding::unlock_by_forwarding_sampled(&inst, rng)? == Unlocked::Bit(bit)])
    })?;
    qs.push(Quantity::exact("forwarding_p_recovered", decided, Some(expected_decided)).sampled(hits[0], cfg.trials));
    qs.push(Quantity::exact("hiding_gap", datahiding::hiding_gap(net, pair, None)?, Some(0.0)));
    Ok((qs, events, "data hiding, forwarding unlock"))
}

fn refbits(net: &Network, pair: HidingPair, p_same: f64, cfg: &RunnerConfig) -> Result<Section> {
    let mut qs = Vec::new();
    let mut events = Vec::new();
    for config in RefbitConfig::ALL {
        for bit in HiddenBit::ALL {
            let inst = datahiding::hide_bit(net, bit, pair)?.with_refbits(config)?;
            let r = datahiding::unlock_with_refbits(&inst)?;
            let expected = (pair == HidingPair::SingletTriplet).then_some(if bit == config.identifies() {
                0.125
            } else {
                0.0
            });
            let cname = match config {
                RefbitConfig::SameState => "same",
                RefbitConfig::Orthogonal => "orthogonal",
            };
            qs.push(Quantity::exact(
                format!("p_both_singlet_{cname}_{}", bit_name(bit)),
                r.p_both_singlet,
                expected,
            ));
            if events.is_empty() {
                events = inst.transcript().to_vec();
            }
        }
        qs.push(Quantity::exact(
            format!("hiding_gap_{}", if config == RefbitConfig::SameState { "same" } else { "orthogonal" }),
            datahiding::hiding_gap(net, pair, Some(config))?,
            Some(0.0),
        ));
    }
    let exact = if pair == HidingPair::SingletTriplet {
        datahiding::refbit_success_probability(net, p_same)?
    } else {
        f64::NAN
    };
    let hits = tally(cfg.seed, cfg.trials, |rng| {
        let bit = random_bit(rng);
        let config = if rng.random::<f64>() < p_same {
            RefbitConfig::SameState
        } else {
            RefbitConfig::Orthogonal
        };
        let inst = datahiding::hide_bit(net, bit, pair)?.with_refbits(config)?;
        let out = datahiding::unlock_with_refbits_sampled(&inst, rng)?;
        let right = match bit {
            HiddenBit::Plus => RefbitOutcome::ConclusivePlus,
            HiddenBit::Minus => RefbitOutcome::ConclusiveMinus,
        };
        Ok([out == right])
    })?;
    if exact.is_finite() {
        qs.push(Quantity::exact("p_success", exact, Some(1.0 / 16.0)).sampled(hits[0], cfg.trials));
    }
    Ok((qs, events, "data hiding, refbit unlock"))
}

fn op_name(op: Operation) -> &'static str {
    match op {
        Operation::I => "i",
        Operation::X => "x",
        Operation::Y => "y",
        Operation::Z => "z",
    }
}

/// Expected `(P(singlet), P(phi_01))` per operation and resource level.
fn expected_round(op: Operation, resource: ResourceLevel) -> (f64, f64) {
    let singlet = if op == Operation::I { 1.0 } else { 0.0 };
    let phi01 = match (resource, op) {
        (ResourceLevel::EntangledPair, Operation::X) => 1.0 / 3.0,
        (ResourceLevel::TwoRefbits, Operation::X | Operation::Y) => 1.0 / 6.0,
        _ => 0.0,
    };
    (singlet, phi01)
}

fn dense(net: &Network, resource: ResourceLevel, strategy: &Strategy, cfg: &RunnerConfig) -> Result<Section> {
    let mut qs = Vec::new();
    let mut events = Vec::new();
    for op in Operation::ALL {
        let r = superdense::superdense_round(net, op, resource)?;
        let (es, ep) = expected_round(op, resource);
        qs.push(Quantity::exact(format!("p_singlet_{}", op_name(op)), r.p_singlet, Some(es)));
        qs.push(Quantity::exact(format!("p_phi01_{}", op_name(op)), r.p_phi01, Some(ep)));
        if op == Operation::X {
            events = r.transcript;
        }
    }
    let summary = superdense::strategy_summary(net, strategy, resource)?;
    let mut expect_one = 0.0;
    let mut expect_two = 0.0;
    for &(op, w) in &strategy.0 {
        let (es, ep) = expected_round(op, resource);
        expect_one += w * es;
        if matches!(op, Operation::X | Operation::Y) {
            expect_two += w * ep;
        }
    }
    let hits = tally(cfg.seed, cfg.trials, |rng| {
        let op = strategy.sample(rng);
        let out = superdense::superdense_round_sampled(net, op, resource, rng)?;
        Ok([
            out == BobOutcome::Singlet,
            out == BobOutcome::Phi01 && matches!(op, Operation::X | Operation::Y),
        ])
    })?;
    qs.push(Quantity::exact("one_bit_event", summary.one_bit, Some(expect_one)).sampled(hits[0], cfg.trials));
    qs.push(Quantity::exact("two_bit_event", summary.two_bit, Some(expect_two)).sampled(hits[1], cfg.trials));
    Ok((qs, events, "superdense coding"))
}

fn commitment(net: &Network, cheat: bool, cfg: &RunnerConfig) -> Result<Section> {
    let mut qs = Vec::new();
    qs.push(Quantity::exact(
        "p_singlet_case0",
        commitment::bob_probe_exact(net, 0)?[0],
        Some(0.25),
    ));
    for (w, s) in commitment::commit_exact(net, 1)? {
        let (name, expected_p, expected_w) = match s.choice {
            Some(WireChoice::FirstThird) => ("first_third", 0.75, 1.0 / 3.0),
            _ => ("first_second", 0.0, 2.0 / 3.0),
        };
        qs.push(Quantity::exact(format!("p_singlet_case1_{name}"), commitment::bob_probe(&s)?[0], Some(expected_p)));
        qs.push(Quantity::exact(format!("p_choice_case1_{name}"), w, Some(expected_w)));
    }
    let hits = tally(cfg.seed, cfg.trials, |rng| {
        let bit = u8::from(rng.random::<bool>());
        let s = commitment::commit(net, bit, rng)?;
        Ok([commitment::bob_probe_sampled(&s, rng)?])
    })?;
    qs.push(
        Quantity::exact("p_singlet_case1_mixture", commitment::bob_probe_exact(net, 1)?[0], Some(0.25))
            .sampled(hits[0], cfg.trials),
    );
    let r0 = commitment::bob_reduced_state(net, 0)?;
    let r1 = commitment::bob_reduced_state(net, 1)?;
    qs.push(Quantity::exact("bob_reduced_state_gap", r0.max_diff(&r1), Some(0.0)));
    qs.push(Quantity::exact("hiding_gap", commitment::commitment_hiding_gap(net)?, Some(0.0)));
    for bit in [0u8, 1] {
        let accept: f64 = commitment::commit_exact(net, bit)?
            .into_iter()
            .map(|(w, mut s)| Ok(w * commitment::reveal_and_verify(&mut s, bit)?.accept_probability))
            .sum::<Result<f64>>()?;
        qs.push(Quantity::exact(format!("honest_accept_bit{bit}"), accept, Some(1.0)));
    }
    let (_, base) = commitment::commit_exact(net, 0)?.remove(0);
    let mut events = base.transcript().to_vec();
    if cheat {
        let mut zero = base.clone();
        let a0 = commitment::reveal_and_verify(&mut zero, 0)?.accept_probability;
        let mut one = base.clone();
        commitment::cheat(&mut one)?;
        let a1 = commitment::reveal_and_verify(&mut one, 1)?.accept_probability;
        events = one.transcript().to_vec();
        let hits = tally(cfg.seed ^ 0x5eed, cfg.trials, |rng| {
            let mut s = commitment::commit(net, 0, rng)?;
            commitment::cheat(&mut s)?;
            Ok([commitment::reveal_sampled(&mut s, 1, rng)?])
        })?;
        qs.push(Quantity::exact("cheat_accept_bit0", a0, Some(1.0)));
        qs.push(Quantity::exact("cheat_accept_bit1", a1, Some(1.0)).sampled(hits[0], cfg.trials));
    }
    Ok((qs, events, "bit commitment"))
}
