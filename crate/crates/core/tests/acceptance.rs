//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach standard output.

use qframes::frames::{wilson_trace, FrameRestriction, Network, PartyId, ALICE, BOB, CHARLIE};
use qframes::gaugefield::{
    gauge_transform, infinitesimal_gauge_delta, transport_of_links, wilson_loop, GaugePath, LatticeGaugeTransform,
    PathSegment,
};
use qframes::invariants::{
    invariant_povms, j1_generators, printed_j1_generators, phi_invariant_states, relabel_coefficients, Bell,
};
use qframes::protocols::commitment::{
    bob_probe, bob_probe_exact, bob_reduced_state, cheat, commit_exact, commitment_hiding_gap, reveal_and_verify,
    WireChoice,
};
use qframes::protocols::datahiding::{
    hide_bit, hiding_gap, refbit_success_probability, unlock_by_forwarding, unlock_with_refbits,
    unlock_with_refbits_sampled, HiddenBit, HidingPair, RefbitConfig, RefbitOutcome, Unlocked,
};
use qframes::protocols::superdense::{
    strategy_summary, superdense_round, superdense_round_sampled, BobOutcome, Operation, ResourceLevel, Strategy,
};
use qframes::protocols::tally;
use qframes::qmath::{c, Operator, PureState, Su2};
use qframes::resources::{
    convert_ebit, correct_outcome1, dressed_ghz, ebit_classes_interconvert, ghz_branches, lu_equivalence,
    lu_equivalence_ensemble, make_ebit, Corrector, LuOptions,
};
use qframes::{seeding, Result};
use rand::Rng;

const EXACT: f64 = 1e-12;
const TRIALS: u64 = 100_000;
const SIGMA_BAND: f64 = 3.0;

fn net(seed: u64, parties: usize) -> Network {
    Network::build(seed, parties, FrameRestriction::Full).expect("network")
}

/// `|f − p| ≤ 3σ` for a sampled frequency; exact match when `σ = 0`.
fn within_band(hits: u64, trials: u64, p: f64) -> (bool, String) {
    let f = hits as f64 / trials as f64;
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let ok = if sigma == 0.0 {
        f == p
    } else {
        (f - p).abs() <= SIGMA_BAND * sigma
    };
    (ok, format!("sampled {f:.5} vs {p:.5} (σ {sigma:.1e})"))
}

fn criterion1() -> Result<(bool, String)> {
    let mut residual: f64 = 0.0;
    let mut wrong = 0;
    for seed in 0..1000 {
        let n = net(seed, 3);
        for bit in HiddenBit::ALL {
            let r = unlock_by_forwarding(&hide_bit(&n, bit, HidingPair::SingletTriplet)?)?;
            let p_correct = if bit == HiddenBit::Minus { r.p_singlet } else { 1.0 - r.p_singlet };
            residual = residual.max(1.0 - p_correct);
            wrong += usize::from(r.outcome != Unlocked::Bit(bit));
        }
    }
    Ok((
        residual < 1e-10 && wrong == 0,
        format!("1000 networks, max residual {residual:.1e}, wrong verdicts {wrong}"),
    ))
}

fn criterion2() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let n = net(seed, 3);
        for config in RefbitConfig::ALL {
            for bit in HiddenBit::ALL {
                let r = unlock_with_refbits(&hide_bit(&n, bit, HidingPair::SingletTriplet)?.with_refbits(config)?)?;
                let want = if bit == config.identifies() { 0.125 } else { 0.0 };
                worst = worst.max((r.p_both_singlet - want).abs());
            }
        }
        worst = worst.max((refbit_success_probability(&n, 0.5)? - 1.0 / 16.0).abs());
    }
    let n = net(7, 3);
    let hits = tally(2, TRIALS, |rng| {
        let bit = if rng.random::<bool>() { HiddenBit::Plus } else { HiddenBit::Minus };
        let config = if rng.random::<bool>() { RefbitConfig::SameState } else { RefbitConfig::Orthogonal };
        let inst = hide_bit(&n, bit, HidingPair::SingletTriplet)?.with_refbits(config)?;
        let right = match bit {
            HiddenBit::Plus => RefbitOutcome::ConclusivePlus,
            HiddenBit::Minus => RefbitOutcome::ConclusiveMinus,
        };
        Ok([unlock_with_refbits_sampled(&inst, rng)? == right])
    })?;
    let (ok, text) = within_band(hits[0], TRIALS, 1.0 / 16.0);
    Ok((worst < EXACT && ok, format!("exact residual {worst:.1e}; P_success {text}")))
}

fn criterion3() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let n = net(seed, 2);
        let p = |op, res| superdense_round(&n, op, res);
        worst = worst.max((p(Operation::I, ResourceLevel::None)?.p_singlet - 1.0).abs());
        worst = worst.max((p(Operation::X, ResourceLevel::EntangledPair)?.p_phi01 - 1.0 / 3.0).abs());
        worst = worst.max(p(Operation::Y, ResourceLevel::EntangledPair)?.p_phi01.abs());
        worst = worst.max(p(Operation::Z, ResourceLevel::EntangledPair)?.p_phi01.abs());
        worst = worst.max((p(Operation::X, ResourceLevel::TwoRefbits)?.p_phi01 - 1.0 / 6.0).abs());
        worst = worst.max((p(Operation::Y, ResourceLevel::TwoRefbits)?.p_phi01 - 1.0 / 6.0).abs());
        let s = strategy_summary(&n, &Strategy::reference(), ResourceLevel::TwoRefbits)?;
        worst = worst.max((s.two_bit - 1.0 / 24.0).abs());
    }
    let n = net(7, 2);
    let strategy = Strategy::reference();
    let hits = tally(3, TRIALS, |rng| {
        let op = strategy.sample(rng);
        let out = superdense_round_sampled(&n, op, ResourceLevel::TwoRefbits, rng)?;
        Ok([
            out == BobOutcome::Phi01 && matches!(op, Operation::X | Operation::Y),
            out == BobOutcome::Singlet,
        ])
    })?;
    let (two_ok, two) = within_band(hits[0], TRIALS, 1.0 / 24.0);
    let (one_ok, one) = within_band(hits[1], TRIALS, 0.5);
    Ok((
        worst < EXACT && two_ok && one_ok,
        format!("exact residual {worst:.1e}; two-bit {two}; one-bit {one}"),
    ))
}

fn criterion4() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut rho_gap: f64 = 0.0;
    let mut cheat_accept: f64 = 1.0;
    for seed in 0..10 {
        let n = net(seed, 2);
        worst = worst.max((bob_probe_exact(&n, 0)?[0] - 0.25).abs());
        worst = worst.max((bob_probe_exact(&n, 1)?[0] - 0.25).abs());
        for (_, s) in commit_exact(&n, 1)? {
            let want = if s.choice == Some(WireChoice::FirstThird) { 0.75 } else { 0.0 };
            worst = worst.max((bob_probe(&s)?[0] - want).abs());
        }
        rho_gap = rho_gap.max(bob_reduced_state(&n, 0)?.max_diff(&bob_reduced_state(&n, 1)?));
        for (_, s) in commit_exact(&n, 0)? {
            let mut honest = s.clone();
            cheat_accept = cheat_accept.min(reveal_and_verify(&mut honest, 0)?.accept_probability);
            let mut lying = s;
            cheat(&mut lying)?;
            cheat_accept = cheat_accept.min(reveal_and_verify(&mut lying, 1)?.accept_probability);
        }
    }
    Ok((
        worst < EXACT && rho_gap < EXACT && cheat_accept >= 1.0 - 1e-10,
        format!("singlet residual {worst:.1e}, reduced-state gap {rho_gap:.1e}, min cheat acceptance {cheat_accept:.12}"),
    ))
}

fn random_route<R: Rng>(rng: &mut R, parties: usize, hops: usize) -> Vec<PartyId> {
    let mut route = vec![PartyId(0)];
    for i in 1..hops {
        let prev = route[i - 1];
        let options: Vec<usize> = (0..parties)
            .filter(|&p| PartyId(p) != prev && !(i == hops - 1 && p == 0))
            .collect();
        route.push(PartyId(options[rng.random_range(0..options.len())]));
    }
    route.push(PartyId(0));
    route
}

fn criterion5() -> Result<(bool, String)> {
    let mut rng = seeding::master(5);
    let mut frame_res: f64 = 0.0;
    let mut lattice_res: f64 = 0.0;
    for hops in 2..=8 {
        let n = net(500 + hops as u64, 4);
        let route = random_route(&mut rng, 4, hops);
        let w = wilson_trace(&n, &route)?.scalar().expect("scalar");
        for _ in 0..100 {
            let moved = n.with_frame_change(PartyId(rng.random_range(0..4)), &Su2::haar(&mut rng))?;
            frame_res = frame_res.max((wilson_trace(&moved, &route)?.scalar().expect("scalar") - w).norm());
        }
        let segs = (0..hops)
            .map(|_| PathSegment::new([0; 3].map(|_| rng.random_range(-2.0..2.0)), rng.random_range(0.1..1.0), 1.0))
            .collect::<Result<Vec<_>>>()?;
        let path = GaugePath::new(segs, true)?;
        let wl = wilson_loop(&path)?;
        for _ in 0..100 {
            let lgt = LatticeGaugeTransform::random(&path, &mut rng);
            lattice_res = lattice_res.max((transport_of_links(&gauge_transform(&path, &lgt)?).trace() - wl).norm());
        }
    }

    let steps = 1024;
    let field: Vec<[f64; 3]> = (0..3).map(|_| [0; 3].map(|_| rng.random_range(-1.0..1.0))).collect();
    let segs = (0..steps)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + 0.5) / steps as f64;
            let a = [0, 1, 2].map(|k| field[0][k] + field[1][k] * t.sin() + field[2][k] * (2.0 * t).cos());
            PathSegment::new(a, 1.0 / steps as f64, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    let smooth = GaugePath::new(segs, true)?;
    let modes: Vec<[f64; 3]> = (0..3).map(|_| [0; 3].map(|_| rng.random_range(-1.0..1.0))).collect();
    let w0 = wilson_loop(&smooth)?;
    let delta = |eps: f64| -> Result<f64> {
        let alpha: Vec<[f64; 3]> = (0..=steps)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / steps as f64;
                [0, 1, 2].map(|a| eps * (modes[0][a] + modes[1][a] * t.sin() + modes[2][a] * t.cos()))
            })
            .collect();
        Ok((wilson_loop(&infinitesimal_gauge_delta(&smooth, &alpha, 1.0)?)? - w0).norm())
    };
    let ratio = delta(1e-3)? / delta(5e-4)?;
    Ok((
        frame_res < EXACT && lattice_res < EXACT && (ratio - 4.0).abs() <= 0.5,
        format!("frame-change residual {frame_res:.1e}, lattice residual {lattice_res:.1e}, halving ratio {ratio:.4}"),
    ))
}

/// `(V_kl R_lk ⊗ I)(|0_k1_l⟩ − |1_k0_l⟩)/√2` in holder bases, from ground truth.
fn reversed_ebit(n: &Network, k: PartyId, l: PartyId) -> Result<PureState> {
    let fk = Operator::from_su2(&n.frame(k)?);
    let fl = Operator::from_su2(&n.frame(l)?);
    let ket = |f: &Operator, b: usize| PureState::basis(1, b).apply(f);
    let mixed = PureState::combine(&[
        (c(1.0, 0.0), &ket(&fk, 0)?.kron(&ket(&fl, 1)?)),
        (c(-1.0, 0.0), &ket(&fk, 1)?.kron(&ket(&fl, 0)?)),
    ])?;
    let dress = n.channel(k, l)? * n.relative_frame(l, k)?;
    let physical = mixed.apply(&Operator::from_su2(&dress).kron(&Operator::identity(1)))?;
    physical.apply(&fk.adjoint().kron(&fl.adjoint()))
}

fn criterion6() -> Result<(bool, String)> {
    let mut fidelity: f64 = 1.0;
    let mut classes: f64 = 0.0;
    for seed in 0..100 {
        let n = net(600 + seed, 2);
        let made = make_ebit(&n, ALICE, BOB, Bell::Zero)?;
        let converted = convert_ebit(&n, &made, BOB)?;
        let f = converted.state.inner(&reversed_ebit(&n, ALICE, BOB)?)?.norm_sqr();
        fidelity = fidelity.min(f);
        classes = classes.max(ebit_classes_interconvert(&n, ALICE, BOB)?);
    }
    Ok((
        fidelity >= 1.0 - EXACT && classes < EXACT,
        format!("100 networks, min fidelity 1 - {:.1e}, worst class infidelity {classes:.1e}", 1.0 - fidelity),
    ))
}

fn criterion7() -> Result<(bool, String)> {
    let n = net(7, 3);
    let outcome1 = ghz_branches(&n, ALICE, BOB, CHARLIE)?
        .into_iter()
        .find(|b| b.outcome == 1)
        .expect("outcome-1 branch");
    let by_bob = correct_outcome1(&n, &outcome1, Corrector::Bob)?;
    let by_pair = correct_outcome1(&n, &outcome1, Corrector::AliceAndCharlie)?;
    let flips = lu_equivalence(&by_bob.state, &by_pair.state, &LuOptions::default())?;

    let x = Su2::pauli_x();
    let pairs = (0..20)
        .map(|s| {
            let n = net(700 + s, 3);
            Ok((
                dressed_ghz(&n, ALICE, BOB, CHARLIE, &Su2::identity())?,
                dressed_ghz(&n, ALICE, BOB, CHARLIE, &x)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = LuOptions {
        restarts: 32,
        ..LuOptions::default()
    };
    let ensemble = lu_equivalence_ensemble(&pairs, &opts)?;
    Ok((
        flips.max_fidelity >= 1.0 - 1e-6 && ensemble.max_fidelity < 0.999,
        format!(
            "flip forms fidelity {:.9}; dressed vs undressed over 20 networks {:.6} (32 restarts)",
            flips.max_fidelity, ensemble.max_fidelity
        ),
    ))
}

fn criterion8() -> Result<(bool, String)> {
    let mut rng = seeding::master(8);
    let haar: Vec<Su2> = (0..100).map(|_| Su2::haar(&mut rng)).collect();
    let (mut complete, mut negative, mut comm): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in 2..=4 {
        for povm in invariant_povms(n)? {
            complete = complete.max(povm.completeness_residual());
            negative = negative.max(-povm.min_eigenvalue());
            for u in &haar {
                comm = comm.max(povm.collective_commutator(u));
            }
        }
    }
    let (phi00, phi01) = phi_invariant_states();
    let r12 = 12f64.sqrt();
    let mut relabel: f64 = 0.0;
    for (got, want) in [
        (relabel_coefficients(&phi00)?, [0.5, 0.5, -0.5, -0.5]),
        (relabel_coefficients(&phi01)?, [-3.0 / r12, 1.0 / r12, -1.0 / r12, -1.0 / r12]),
    ] {
        for (g, w) in got.iter().zip(want) {
            relabel = relabel.max((g - c(w, 0.0)).norm());
        }
    }
    let derived = j1_generators();
    let printed = printed_j1_generators();
    let algebra = derived.algebra_residual();
    let d = derived.distance(&printed);
    let negated = (derived.0[1] + printed.0[1]).camax();
    let t_y = if d[1] < EXACT {
        "t_y matches the printed matrix"
    } else if negated < EXACT {
        "t_y is the negative of the printed matrix"
    } else {
        "t_y matches neither sign of the printed matrix"
    };
    Ok((
        complete < EXACT && negative < EXACT && comm < EXACT && relabel < EXACT && algebra < EXACT
            && d[0] < EXACT
            && d[2] < EXACT,
        format!(
            "completeness {complete:.1e}, negativity {negative:.1e}, commutator {comm:.1e}, relabel {relabel:.1e}, \
             algebra {algebra:.1e}, t_x {:.1e}, t_z {:.1e}; {t_y}",
            d[0], d[2]
        ),
    ))
}

fn criterion9() -> Result<(bool, String)> {
    let mut povm_gap: f64 = 0.0;
    let mut state_gap: f64 = 0.0;
    for seed in 0..20 {
        let n = net(900 + seed, 3);
        for pair in [HidingPair::SingletTriplet, HidingPair::TwoTriplets] {
            for refbits in [None, Some(RefbitConfig::SameState), Some(RefbitConfig::Orthogonal)] {
                povm_gap = povm_gap.max(hiding_gap(&n, pair, refbits)?);
                let lab = |bit| -> Result<_> {
                    let inst = hide_bit(&n, bit, pair)?;
                    Ok(match refbits {
                        Some(cfg) => inst.with_refbits(cfg)?,
                        None => inst,
                    })
                };
                let (plus, minus) = (lab(HiddenBit::Plus)?, lab(HiddenBit::Minus)?);
                for party in [ALICE, BOB] {
                    let wires = plus.lab().wires_of(party);
                    let a = plus.lab().reduced(&wires)?;
                    let b = minus.lab().reduced(&wires)?;
                    state_gap = state_gap.max(a.max_diff(&b));
                }
            }
        }
        let two = net(950 + seed, 2);
        povm_gap = povm_gap.max(commitment_hiding_gap(&two)?);
        state_gap = state_gap.max(bob_reduced_state(&two, 0)?.max_diff(&bob_reduced_state(&two, 1)?));
    }
    Ok((
        povm_gap < EXACT && state_gap < EXACT,
        format!("invariant-POVM total variation {povm_gap:.1e}, receiver reduced-state gap {state_gap:.1e}"),
    ))
}

type Criterion = fn() -> Result<(bool, String)>;

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("data hiding, forwarding unlock", criterion1),
        ("data hiding, refbit unlock", criterion2),
        ("superdense coding", criterion3),
        ("bit commitment", criterion4),
        ("gauge and frame invariance", criterion5),
        ("ebit equivalence", criterion6),
        ("GHZ classes", criterion7),
        ("invariant subspaces", criterion8),
        ("hiding property", criterion9),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("criterion {} ({title}): {} | {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
        failed += usize::from(!pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
