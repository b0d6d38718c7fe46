//! Sampled protocol runs against their exact distributions.

use qframes::frames::{FrameRestriction, Network};
use qframes::protocols::commitment::{bob_probe, bob_probe_sampled, cheat, commit, reveal_and_verify, reveal_sampled};
use qframes::protocols::datahiding::{
    hide_bit, unlock_by_forwarding, unlock_by_forwarding_sampled, unlock_with_refbits, unlock_with_refbits_sampled,
    HiddenBit, HidingPair, RefbitConfig, RefbitOutcome, Unlocked,
};
use qframes::protocols::superdense::{superdense_round, superdense_round_sampled, BobOutcome, Operation, ResourceLevel};
use qframes::protocols::tally;

const TRIALS: u64 = 20_000;

fn assert_band(hits: u64, p: f64, what: &str) {
    let f = hits as f64 / TRIALS as f64;
    let sigma = (p * (1.0 - p) / TRIALS as f64).sqrt();
    if sigma == 0.0 {
        assert_eq!(f, p, "{what}");
    } else {
        assert!((f - p).abs() <= 4.0 * sigma, "{what}: sampled {f} vs exact {p}");
    }
}

fn net(seed: u64, parties: usize) -> Network {
    Network::build(seed, parties, FrameRestriction::Full).unwrap()
}

#[test]
fn forwarding_is_deterministic() {
    let n = net(11, 3);
    for bit in HiddenBit::ALL {
        let inst = hide_bit(&n, bit, HidingPair::SingletTriplet).unwrap();
        let exact = unlock_by_forwarding(&inst).unwrap();
        assert_eq!(exact.outcome, Unlocked::Bit(bit));
        let [right] = tally(1, 2_000, |rng| {
            let inst = hide_bit(&n, bit, HidingPair::SingletTriplet)?;
            Ok([unlock_by_forwarding_sampled(&inst, rng)? == Unlocked::Bit(bit)])
        })
        .unwrap();
        assert_eq!(right, 2_000);
    }
}

#[test]
fn two_triplets_stay_hidden_after_forwarding() {
    let n = net(12, 3);
    for bit in HiddenBit::ALL {
        let inst = hide_bit(&n, bit, HidingPair::TwoTriplets).unwrap();
        assert_eq!(unlock_by_forwarding(&inst).unwrap().outcome, Unlocked::Indeterminate);
    }
}

#[test]
fn refbit_unlock_matches_exact() {
    let n = net(13, 3);
    for config in RefbitConfig::ALL {
        for bit in HiddenBit::ALL {
            let build = || hide_bit(&n, bit, HidingPair::SingletTriplet)?.with_refbits(config);
            let exact = unlock_with_refbits(&build().unwrap()).unwrap().p_both_singlet;
            let [hits] = tally(2, TRIALS, |rng| {
                let inst = build()?;
                Ok([unlock_with_refbits_sampled(&inst, rng)? != RefbitOutcome::Inconclusive])
            })
            .unwrap();
            assert_band(hits, exact, &format!("{config:?} {bit:?}"));
        }
    }
}

#[test]
fn superdense_matches_exact() {
    let n = net(14, 2);
    for resource in [ResourceLevel::None, ResourceLevel::EntangledPair, ResourceLevel::TwoRefbits] {
        for op in Operation::ALL {
            let exact = superdense_round(&n, op, resource).unwrap();
            let [singlet, phi01] = tally(3, TRIALS, |rng| {
                let out = superdense_round_sampled(&n, op, resource, rng)?;
                Ok([out == BobOutcome::Singlet, out == BobOutcome::Phi01])
            })
            .unwrap();
            let what = format!("{op:?} with {resource:?}");
            assert_band(singlet, exact.p_singlet, &what);
            assert_band(phi01, exact.p_phi01, &what);
        }
    }
}

#[test]
fn commitment_probe_and_cheat_match_exact() {
    let n = net(15, 2);
    let [singlet] = tally(4, TRIALS, |rng| {
        let s = commit(&n, 1, rng)?;
        Ok([bob_probe_sampled(&s, rng)?])
    })
    .unwrap();
    assert_band(singlet, 0.25, "probe of committed 1");

    let [accepted] = tally(5, TRIALS, |rng| {
        let mut s = commit(&n, 0, rng)?;
        cheat(&mut s)?;
        Ok([reveal_sampled(&mut s, 1, rng)?])
    })
    .unwrap();
    assert_eq!(accepted, TRIALS, "cheating opening must always pass");

    let [honest] = tally(6, TRIALS, |rng| {
        let mut s = commit(&n, 1, rng)?;
        Ok([reveal_sampled(&mut s, 1, rng)?])
    })
    .unwrap();
    assert_eq!(honest, TRIALS);
}

#[test]
fn exact_commitment_branches_are_consistent() {
    let n = net(16, 2);
    let mut rng = qframes::seeding::master(16);
    let mut s = commit(&n, 0, &mut rng).unwrap();
    let p = bob_probe(&s).unwrap();
    assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
    assert!((reveal_and_verify(&mut s, 0).unwrap().accept_probability - 1.0).abs() < 1e-12);
    assert!(reveal_and_verify(&mut s, 0).is_err(), "a session opens once");
}
