use qframes::frames::{
    loop_holonomy, observable_g1, observable_g2, wilson_trace, FrameRestriction, Network, ObservableValue, PartyId,
    ALICE, BOB, CHARLIE,
};
use qframes::gaugefield::{
    channels_to_path, gauge_transform, infinitesimal_gauge_delta, path_transport, transport_of_links, wilson_loop,
    GaugePath, LatticeGaugeTransform, PathSegment,
};
use qframes::invariants::{invariant_povms, j1_generators, printed_j1_generators, phi_invariant_states, relabel_coefficients};
use qframes::protocols::datahiding::{hiding_gap, refbit_success_probability, HidingPair, RefbitConfig};
use qframes::protocols::runner::{ProtocolConfig, UnlockMethod};
use qframes::protocols::superdense::{strategy_summary, ResourceLevel, Strategy};
use qframes::protocols::{self, commitment, datahiding, RunnerConfig, Transcript};
use qframes::qmath::{c, Operator, PureState, Su2};
use qframes::resources::{
    convert_ebit, correct_outcome1, dressed_ghz, ebit_classes_interconvert, ghz_branches, lu_equivalence,
    lu_equivalence_ensemble, make_ebit, mixed_basis_singlet_overlap, Corrector, LuOptions, EQUIVALENCE_TOL,
};
use qframes::invariants::Bell;
use qframes::{seeding, Result};
use rand::Rng;

use crate::report::{Quantity, Report, Rule, RunConfig};

/// Structural tolerance for exact invariances.
pub const STRUCT_TOL: f64 = 1e-12;
/// Networks in the forwarding sweep.
pub const FORWARDING_NETWORKS: u64 = 1000;
/// Networks in the GHZ dressing ensemble.
pub const GHZ_NETWORKS: u64 = 20;
/// Segments of the smooth loop in the first-order check; the midpoint rule
/// leaves a first-order term of size `ε h²` that must sit far below `ε²`.
pub const SMOOTH_SEGMENTS: usize = 1024;

fn network_seed(seed: u64, i: u64) -> u64 {
    seeding::stream(seed, i).random()
}

fn sweep(cfg: &RunConfig, parties: usize, count: u64) -> Result<Vec<Network>> {
    (0..count)
        .map(|i| Network::build(network_seed(cfg.seed, i), parties, cfg.restriction))
        .collect()
}

fn frame_change<R: Rng + ?Sized>(rng: &mut R, restriction: FrameRestriction) -> Su2 {
    match restriction {
        FrameRestriction::Full => Su2::haar(rng),
        FrameRestriction::ZRotationOnly => Su2::z_rotation(rng.random_range(0.0..std::f64::consts::TAU)),
    }
}

/// A closed route of `hops` hops based at party 0, consecutive stops distinct.
fn random_route<R: Rng + ?Sized>(rng: &mut R, parties: usize, hops: usize) -> Vec<PartyId> {
    let mut route = vec![PartyId(0)];
    for i in 1..hops {
        let prev = route[i - 1];
        let last = i == hops - 1;
        let choices: Vec<PartyId> = (0..parties)
            .map(PartyId)
            .filter(|&p| p != prev && !(last && p == PartyId(0)))
            .collect();
        route.push(choices[rng.random_range(0..choices.len())]);
    }
    route.push(PartyId(0));
    route
}

fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    PureState::basis(1, 0).apply_su2(&Su2::haar(rng), 0).expect("one wire")
}

fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureState {
    let amps = (0..1usize << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    PureState::normalized(amps).expect("nonzero amplitudes")
}

fn obs_diff(a: &ObservableValue, b: &ObservableValue) -> f64 {
    match (a.scalar(), b.scalar(), a.matrix(), b.matrix()) {
        (Some(x), Some(y), _, _) => (x - y).norm(),
        (_, _, Some(x), Some(y)) => x.max_diff(&y),
        _ => f64::INFINITY,
    }
}

fn random_path<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Result<GaugePath> {
    let segs = (0..len)
        .map(|_| {
            let a = [0; 3].map(|_| rng.random_range(-2.0..2.0));
            PathSegment::new(a, rng.random_range(0.1..1.0), 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    GaugePath::new(segs, true)
}

/// Observable-class checks: frame-change/gauge equivalence, owner-only
/// holonomies, public Wilson traces and the knowledge gate.
pub fn observables(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.parties;
    let nets = sweep(cfg, p, cfg.cycles as u64)?;
    let mut rng = seeding::master(cfg.seed);
    let hops = if p >= 3 { 3 } else { 2 };
    let (mut algebra, mut gauge_eq, mut nonowner, mut wilson_fc, mut base_point) = (0f64, 0f64, 0f64, 0f64, 0f64);
    let mut breaches = 0u32;
    for net in &nets {
        for k in net.parties() {
            for l in net.parties() {
                for m in net.parties() {
                    let lhs = net.relative_frame(k, l)? * net.relative_frame(l, m)?;
                    algebra = algebra.max(lhs.max_diff(&net.relative_frame(k, m)?));
                }
            }
        }
        let route = random_route(&mut rng, p, hops);
        let (phi, psi) = (random_qubit(&mut rng), random_qubit(&mut rng));
        let u = Su2::haar(&mut rng);
        let party = PartyId(rng.random_range(0..p));
        let r = frame_change(&mut rng, cfg.restriction);
        let evaluate = |n: &Network| -> Result<Vec<ObservableValue>> {
            Ok(vec![
                observable_g1(n, ALICE, BOB, &phi, &psi)?,
                observable_g2(n, ALICE, BOB, &u, &phi, &psi)?,
                loop_holonomy(n, &route)?,
                wilson_trace(n, &route)?,
            ])
        };
        let framed = evaluate(&net.with_frame_change(party, &r)?)?;
        let gauged = evaluate(&net.with_channel_gauge(party, &r)?)?;
        for (a, b) in framed.iter().zip(&gauged) {
            gauge_eq = gauge_eq.max(obs_diff(a, b));
        }
        let base = evaluate(net)?;
        let other = PartyId(1 + rng.random_range(0..p - 1));
        let moved = net.with_frame_change(other, &frame_change(&mut rng, cfg.restriction))?;
        nonowner = nonowner.max(obs_diff(&base[2], &loop_holonomy(&moved, &route)?));
        wilson_fc = wilson_fc.max(obs_diff(&base[3], &framed[3]));
        let mut shifted: Vec<PartyId> = route[1..].to_vec();
        shifted.push(route[1]);
        base_point = base_point.max(obs_diff(&base[3], &wilson_trace(net, &shifted)?));

        let mut lab = qframes::frames::Lab::new(net);
        let refused = lab.protocol_scope(|lab| {
            let truth = net.frame(ALICE).is_err();
            let foreign = lab.party(BOB).and_then(|mut b| b.holonomy(&route)).is_err();
            let own = lab.party(ALICE).and_then(|mut a| a.holonomy(&route)).is_ok();
            let public = lab.party(BOB).and_then(|mut b| b.wilson(&route)).is_ok();
            truth && foreign && own && public
        });
        breaches += u32::from(!refused);
    }
    let qs = vec![
        Quantity::below("relative_frame_algebra_residual", algebra, STRUCT_TOL),
        Quantity::below("frame_change_vs_channel_gauge_residual", gauge_eq, STRUCT_TOL),
        Quantity::below("holonomy_nonowner_frame_change_residual", nonowner, STRUCT_TOL),
        Quantity::below("wilson_frame_change_residual", wilson_fc, STRUCT_TOL),
        Quantity::below("wilson_base_point_residual", base_point, STRUCT_TOL),
        Quantity::equals("knowledge_gate_breaches", f64::from(breaches), 0.0, 0.0),
    ];
    Ok(Report::new(cfg.clone(), qs, vec![]))
}

/// First-order gauge change of the Wilson loop on a smooth closed path at
/// parameter scale `eps`.
fn first_order_delta(path: &GaugePath, modes: &[[f64; 3]], eps: f64) -> Result<f64> {
    let n = path.segments().len();
    let alpha: Vec<[f64; 3]> = (0..=n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            [0, 1, 2].map(|a| eps * (modes[0][a] + modes[1][a] * t.sin() + modes[2][a] * t.cos()))
        })
        .collect();
    let shifted = infinitesimal_gauge_delta(path, &alpha, 1.0)?;
    Ok((wilson_loop(&shifted)? - wilson_loop(path)?).norm())
}

fn smooth_closed_path<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<GaugePath> {
    let modes: Vec<[f64; 3]> = (0..3).map(|_| [0; 3].map(|_| rng.random_range(-1.0..1.0))).collect();
    let segs = (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
            let a = [0, 1, 2].map(|k| modes[0][k] + modes[1][k] * t.sin() + modes[2][k] * (2.0 * t).cos());
            PathSegment::new(a, 1.0 / n as f64, 1.0)
        })
        .collect::<Result<Vec<_>>>()?;
    GaugePath::new(segs, true)
}

/// Wilson-loop invariance over path lengths 2 to 8 and the second-order
/// response to a first-order gauge change.
pub fn wilson(cfg: &RunConfig) -> Result<Report> {
    let p = cfg.parties.max(3);
    let mut rng = seeding::master(cfg.seed);
    let mut qs = Vec::new();
    for hops in 2..=8usize {
        let net = Network::build(network_seed(cfg.seed, hops as u64), p, cfg.restriction)?;
        let route = random_route(&mut rng, p, hops);
        let w0 = wilson_trace(&net, &route)?;
        let mut frames = 0f64;
        for _ in 0..cfg.cycles {
            let party = PartyId(rng.random_range(0..p));
            let moved = net.with_frame_change(party, &frame_change(&mut rng, cfg.restriction))?;
            frames = frames.max(obs_diff(&w0, &wilson_trace(&moved, &route)?));
        }
        qs.push(Quantity::below(format!("wilson_frame_change_residual_len{hops}"), frames, STRUCT_TOL));

        let path = random_path(&mut rng, hops)?;
        let w = wilson_loop(&path)?;
        let mut lattice = 0f64;
        for _ in 0..cfg.cycles {
            let lgt = LatticeGaugeTransform::random(&path, &mut rng);
            let h = transport_of_links(&gauge_transform(&path, &lgt)?);
            lattice = lattice.max((h.trace() - w).norm());
        }
        qs.push(Quantity::below(format!("lattice_gauge_residual_len{hops}"), lattice, STRUCT_TOL));
    }

    let two = random_path(&mut rng, 2)?;
    let reversed = GaugePath::new(two.segments().iter().rev().copied().collect(), true)?;
    qs.push(Quantity::judged(
        "path_ordering_gap",
        path_transport(&two).max_diff(&path_transport(&reversed)),
        Rule::AtLeast { limit: 1e-6 },
    ));

    let smooth = smooth_closed_path(&mut rng, SMOOTH_SEGMENTS)?;
    let modes: Vec<[f64; 3]> = (0..3).map(|_| [0; 3].map(|_| rng.random_range(-1.0..1.0))).collect();
    let d1 = first_order_delta(&smooth, &modes, 1e-3)?;
    let d2 = first_order_delta(&smooth, &modes, 5e-4)?;
    qs.push(Quantity::recorded("first_order_delta_eps_1e-3", d1));
    qs.push(Quantity::recorded("first_order_delta_eps_5e-4", d2));
    qs.push(Quantity::judged(
        "first_order_halving_ratio",
        d1 / d2,
        Rule::Within {
            center: 4.0,
            half_width: 0.5,
        },
    ));

    let mut bridge = 0f64;
    for net in sweep(cfg, 3, cfg.cycles as u64)? {
        for cycle in [vec![ALICE, BOB, ALICE], vec![ALICE, BOB, CHARLIE, ALICE]] {
            let h = loop_holonomy(&net, &cycle)?.matrix().expect("holonomy is a matrix");
            let t = path_transport(&channels_to_path(&net, &cycle, 4)?);
            bridge = bridge.max(t.max_diff(&h));
        }
    }
    qs.push(Quantity::below("bridge_residual", bridge, 1e-10));
    Ok(Report::new(cfg.clone(), qs, vec![]))
}

/// Invariant-subspace suite on 2, 3 and 4 qubits.
pub fn povm(cfg: &RunConfig) -> Result<Report> {
    let mut rng = seeding::master(cfg.seed);
    let mut qs = Vec::new();
    for n in 2..=4usize {
        for (i, povm) in invariant_povms(n)?.iter().enumerate() {
            let tag = format!("n{n}_povm{i}");
            qs.push(Quantity::below(format!("{tag}_completeness"), povm.completeness_residual(), STRUCT_TOL));
            qs.push(Quantity::at_least(format!("{tag}_min_eigenvalue"), povm.min_eigenvalue(), -STRUCT_TOL));
            let psi = random_state(&mut rng, n);
            let p0 = povm.probabilities(&psi)?;
            let (mut comm, mut stats) = (0f64, 0f64);
            for _ in 0..cfg.cycles {
                let u = Su2::haar(&mut rng);
                comm = comm.max(povm.collective_commutator(&u));
                let p1 = povm.probabilities(&psi.apply(&Operator::tensor_power(&u, n))?)?;
                stats = stats.max(p0.iter().zip(&p1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            }
            qs.push(Quantity::below(format!("{tag}_collective_commutator"), comm, STRUCT_TOL));
            qs.push(Quantity::below(format!("{tag}_rotated_statistics"), stats, STRUCT_TOL));
        }
    }

    let (phi00, phi01) = phi_invariant_states();
    let r12 = 12f64.sqrt();
    let wants = [
        ("phi00", relabel_coefficients(&phi00)?, [0.5, 0.5, -0.5, -0.5]),
        ("phi01", relabel_coefficients(&phi01)?, [-3.0 / r12, 1.0 / r12, -1.0 / r12, -1.0 / r12]),
    ];
    for (name, got, want) in wants {
        for (k, (g, w)) in got.iter().zip(want).enumerate() {
            qs.push(Quantity::equals(format!("relabel_{name}_{k}"), (g - c(w, 0.0)).norm(), 0.0, STRUCT_TOL));
        }
    }

    let derived = j1_generators();
    let printed = printed_j1_generators();
    let d = derived.distance(&printed);
    qs.push(Quantity::below("j1_algebra_residual", derived.algebra_residual(), STRUCT_TOL));
    qs.push(Quantity::below("j1_t_x_vs_printed", d[0], STRUCT_TOL));
    qs.push(Quantity::below("j1_t_z_vs_printed", d[2], STRUCT_TOL));
    let flipped = (derived.0[1] + printed.0[1]).camax();
    qs.push(Quantity::recorded("j1_t_y_vs_printed", d[1]));
    qs.push(Quantity::recorded("j1_t_y_vs_negated_printed", flipped));
    let sign = if d[1] < STRUCT_TOL {
        1.0
    } else if flipped < STRUCT_TOL {
        -1.0
    } else {
        0.0
    };
    qs.push(Quantity::recorded("j1_t_y_sign_relative_to_printed", sign));
    Ok(Report::new(cfg.clone(), qs, vec![]))
}

/// `(V_kl R_lk ⊗ I)` applied to the mixed-basis singlet, in holder bases.
fn reversed_ebit_oracle(net: &Network, k: PartyId, l: PartyId) -> Result<PureState> {
    let fk = Operator::from_su2(&net.frame(k)?);
    let fl = Operator::from_su2(&net.frame(l)?);
    let ket = |f: &Operator, b: usize| PureState::basis(1, b).apply(f);
    let mixed = PureState::combine(&[
        (c(1.0, 0.0), &ket(&fk, 0)?.kron(&ket(&fl, 1)?)),
        (c(-1.0, 0.0), &ket(&fk, 1)?.kron(&ket(&fl, 0)?)),
    ])?;
    let dress = net.channel(k, l)? * net.relative_frame(l, k)?;
    let physical = mixed.apply(&Operator::from_su2(&dress).kron(&Operator::identity(1)))?;
    physical.apply(&fk.adjoint().kron(&fl.adjoint()))
}

/// Ebit forms and classes, mixed-basis singlets, and the GHZ families.
pub fn resources(cfg: &RunConfig) -> Result<Report> {
    let mut qs = Vec::new();
    let (mut fidelity, mut interconvert, mut mixed) = (1f64, 0f64, 0f64);
    for net in sweep(cfg, 2, cfg.cycles as u64)? {
        let made = make_ebit(&net, ALICE, BOB, Bell::Zero)?;
        let converted = convert_ebit(&net, &made, BOB)?;
        fidelity = fidelity.min(converted.state.overlap(&reversed_ebit_oracle(&net, ALICE, BOB)?)?);
        interconvert = interconvert.max(ebit_classes_interconvert(&net, ALICE, BOB)?);
        mixed = mixed.max(mixed_basis_singlet_overlap(&net, ALICE, BOB)?);
    }
    qs.push(Quantity::at_least("ebit_converted_min_fidelity", fidelity, 1.0 - STRUCT_TOL));
    qs.push(Quantity::below("ebit_class_interconversion_infidelity", interconvert, STRUCT_TOL));
    qs.push(Quantity::below("mixed_basis_singlet_max_overlap", mixed, 1.0 - 1e-3));

    let net = Network::build(cfg.seed, 3, cfg.restriction)?;
    let branches = ghz_branches(&net, ALICE, BOB, CHARLIE)?;
    for b in &branches {
        qs.push(Quantity::equals(format!("ghz_branch{}_probability", b.outcome), b.probability, 0.5, STRUCT_TOL));
    }
    let outcome1 = branches.iter().find(|b| b.outcome == 1).expect("two branches");
    let by_bob = correct_outcome1(&net, outcome1, Corrector::Bob)?;
    let by_pair = correct_outcome1(&net, outcome1, Corrector::AliceAndCharlie)?;
    let flips = lu_equivalence(&by_bob.state, &by_pair.state, &LuOptions::default())?;
    qs.push(Quantity::at_least("ghz_flip_forms_fidelity", flips.max_fidelity, 1.0 - EQUIVALENCE_TOL));

    let x = Su2::pauli_x();
    let pairs = sweep(cfg, 3, GHZ_NETWORKS)?
        .iter()
        .map(|n| Ok((dressed_ghz(n, ALICE, BOB, CHARLIE, &Su2::identity())?, dressed_ghz(n, ALICE, BOB, CHARLIE, &x)?)))
        .collect::<Result<Vec<_>>>()?;
    let opts = LuOptions {
        seed: cfg.seed,
        ..LuOptions::default()
    };
    let single = lu_equivalence(&pairs[0].0, &pairs[0].1, &opts)?;
    qs.push(Quantity::recorded("ghz_dressed_single_network_fidelity", single.max_fidelity));
    let ensemble = lu_equivalence_ensemble(&pairs, &opts)?;
    qs.push(Quantity::below("ghz_dressed_ensemble_fidelity", ensemble.max_fidelity, 0.999));
    Ok(Report::new(cfg.clone(), qs, vec![]))
}

fn runner_section(cfg: &RunConfig, protocol: ProtocolConfig, prefix: &str) -> Result<(Vec<Quantity>, Transcript)> {
    let summary = protocols::run(&RunnerConfig {
        network_seed: cfg.seed,
        seed: cfg.seed,
        trials: cfg.trials,
        restriction: cfg.restriction,
        protocol,
    })?;
    let qs = summary
        .quantities
        .into_iter()
        .map(|q| {
            let mut q = Quantity::from(q);
            if !prefix.is_empty() {
                q.name = format!("{prefix}/{}", q.name);
            }
            q
        })
        .collect();
    Ok((qs, summary.transcript))
}

/// Data hiding: forwarding unlock by default, refbit unlock with `refbits`.
pub fn datahiding(cfg: &RunConfig) -> Result<Report> {
    let unlock = if cfg.refbits {
        UnlockMethod::Refbits
    } else {
        UnlockMethod::Forwarding
    };
    let (mut qs, transcript) = runner_section(
        cfg,
        ProtocolConfig::DataHiding {
            pair: HidingPair::SingletTriplet,
            unlock,
            p_same_state: 0.5,
        },
        "",
    )?;
    let nets = sweep(cfg, 3, cfg.cycles as u64)?;
    if cfg.refbits {
        let mut spread = 0f64;
        for net in &nets {
            spread = spread.max((refbit_success_probability(net, 0.5)? - 1.0 / 16.0).abs());
        }
        qs.push(Quantity::below("p_success_network_spread", spread, STRUCT_TOL));
    } else {
        let mut residual = 0f64;
        for net in sweep(cfg, 3, FORWARDING_NETWORKS)? {
            for bit in datahiding::HiddenBit::ALL {
                let r = datahiding::unlock_by_forwarding(&datahiding::hide_bit(&net, bit, HidingPair::SingletTriplet)?)?;
                let correct = match bit {
                    datahiding::HiddenBit::Plus => 1.0 - r.p_singlet,
                    datahiding::HiddenBit::Minus => r.p_singlet,
                };
                residual = residual.max((1.0 - correct).abs());
                if r.outcome != datahiding::Unlocked::Bit(bit) {
                    residual = f64::INFINITY;
                }
            }
        }
        qs.push(Quantity::below("forwarding_sweep_residual", residual, 1e-10));
    }
    let mut gap = 0f64;
    for net in &nets {
        for pair in [HidingPair::SingletTriplet, HidingPair::TwoTriplets] {
            gap = gap.max(hiding_gap(net, pair, None)?);
            for config in RefbitConfig::ALL {
                gap = gap.max(hiding_gap(net, pair, Some(config))?);
            }
        }
    }
    qs.push(Quantity::below("hiding_gap_sweep", gap, STRUCT_TOL));
    Ok(Report::new(cfg.clone(), qs, vec![transcript]))
}

/// Superdense coding at each resource level under the stated strategy.
pub fn superdense(cfg: &RunConfig) -> Result<Report> {
    let mut qs = Vec::new();
    let mut transcripts = Vec::new();
    let levels = [
        (ResourceLevel::None, "none"),
        (ResourceLevel::EntangledPair, "entangled_pair"),
        (ResourceLevel::TwoRefbits, "two_refbits"),
    ];
    for (resource, name) in levels {
        let (q, t) = runner_section(
            cfg,
            ProtocolConfig::Superdense {
                resource,
                strategy: Strategy::reference(),
            },
            name,
        )?;
        qs.extend(q);
        transcripts.push(t);
    }
    let mut spread = 0f64;
    for net in sweep(cfg, 2, cfg.cycles as u64)? {
        let s = strategy_summary(&net, &Strategy::reference(), ResourceLevel::TwoRefbits)?;
        spread = spread.max((s.one_bit - 0.5).abs()).max((s.two_bit - 1.0 / 24.0).abs());
    }
    qs.push(Quantity::below("two_refbits/event_network_spread", spread, STRUCT_TOL));
    Ok(Report::new(cfg.clone(), qs, transcripts))
}

/// Bit commitment, honest and (with `cheat`) with Alice's cheat.
pub fn commit(cfg: &RunConfig) -> Result<Report> {
    let (mut qs, transcript) = runner_section(cfg, ProtocolConfig::Commitment { cheat: cfg.cheat }, "")?;
    let mut spread = 0f64;
    let mut gap = 0f64;
    for net in sweep(cfg, 2, cfg.cycles as u64)? {
        for bit in [0u8, 1] {
            spread = spread.max((commitment::bob_probe_exact(&net, bit)?[0] - 0.25).abs());
        }
        gap = gap.max(commitment::commitment_hiding_gap(&net)?);
    }
    qs.push(Quantity::below("p_singlet_network_spread", spread, STRUCT_TOL));
    qs.push(Quantity::below("hiding_gap_sweep", gap, STRUCT_TOL));
    Ok(Report::new(cfg.clone(), qs, vec![transcript]))
}
