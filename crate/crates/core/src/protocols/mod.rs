//! The three protocols: hiding a bit from two parties who lack a shared
//! frame, superdense coding helped by refbits, and a bit commitment that
//! Alice can always cheat.
//!
//! Every step runs through party capabilities inside a protocol scope.
//! Probabilities are computed exactly from the state; the sampled variants
//! and [`runner`] exist to cross-check them.

pub mod commitment;
pub mod datahiding;
pub mod runner;
pub mod superdense;

pub use commitment::{
    bob_probe, bob_probe_exact, bob_probe_sampled, bob_reduced_state, cheat, cheat_unitary, commit, commit_exact,
    commitment_hiding_gap, reveal_and_verify, reveal_sampled, verify_announcement, Announcement, CommitmentSession,
    Opening, Phase, WireChoice,
};
pub use datahiding::{
    hide_bit, hiding_gap, refbit_success_probability, unlock_by_forwarding, unlock_by_forwarding_sampled,
    unlock_with_refbits, unlock_with_refbits_sampled, DataHidingInstance, ForwardingReport, HiddenBit, HidingPair,
    RefbitConfig, RefbitOutcome, RefbitReport, Unlocked,
};
pub use runner::{run, run_json, ProtocolConfig, Quantity, RunSummary, RunnerConfig, Transcript};
pub use superdense::{
    strategy_summary, superdense_round, superdense_round_sampled, BobOutcome, Operation, ResourceLevel, RoundRecord,
    Strategy, StrategySummary,
};

use rayon::prelude::*;

use crate::error::Result;
use crate::seeding;

/// `½ Σ |p_i − q_i|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Runs `trials` independent replicas in parallel, replica `t` on stream
/// `t` of `seed`, and counts how often each of the `K` events occurred.
pub fn tally<const K: usize, F>(seed: u64, trials: u64, f: F) -> Result<[u64; K]>
where
    F: Fn(&mut seeding::Rng) -> Result<[bool; K]> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let hits = f(&mut seeding::stream(seed, t))?;
            Ok(hits.map(u64::from))
        })
        .try_reduce(
            || [0; K],
            |a, b| {
                let mut out = a;
                for (o, x) in out.iter_mut().zip(b) {
                    *o += x;
                }
                Ok(out)
            },
        )
}
