use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tv_distance;
use crate::error::{input, Error, Result};
use crate::frames::{Event, Lab, Network, PartyId, ALICE, BOB};
use crate::invariants::{invariant_povms, phi_invariant_states, povm2_singlet_triplet, Povm};
use crate::qmath::{c, eigh_matrix, DensityOperator, Operator, PureState, C64};

/// Alice's wires: the four-qubit state on 0..4, the ancilla on 4.
const ANCILLA: usize = 4;
/// Wires Bob receives at commit time.
const SENT: [usize; 2] = [0, 2];
/// Wires Alice keeps, in the order the cheat unitary acts on them.
const KEPT: [usize; 3] = [1, 3, ANCILLA];

/// Which qubits of the four-qubit state Bob holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireChoice {
    /// Qubits 1 and 3.
    FirstThird,
    /// Qubits 1 and 2.
    FirstSecond,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Committed,
    Opened,
}

/// What Alice tells Bob when opening.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Announcement {
    pub bit: u8,
    pub choice: WireChoice,
}

/// Result of an opening, exact over Alice's remaining randomness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub claimed: u8,
    pub accept_probability: f64,
    pub announcements: Vec<(Announcement, f64)>,
}

#[derive(Clone)]
pub struct CommitmentSession<'n> {
    pub committer: PartyId,
    pub receiver: PartyId,
    pub bit: u8,
    /// `None` while the choice still sits coherently in Alice's ancilla.
    pub choice: Option<WireChoice>,
    pub cheated: bool,
    phase: Phase,
    lab: Lab<'n>,
}

impl<'n> CommitmentSession<'n> {
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn lab(&self) -> &Lab<'n> {
        &self.lab
    }

    pub fn transcript(&self) -> &[Event] {
        self.lab.transcript()
    }

    fn require_committed(&self) -> Result<()> {
        match self.phase {
            Phase::Committed => Ok(()),
            Phase::Opened => Err(Error::State("the commitment has already been opened".into())),
        }
    }
}

/// `√(1/3)|0⟩ + √(2/3)|1⟩`: ancilla 0 keeps qubits (1,3) at Bob's wires.
fn coin() -> PureState {
    PureState::new(vec![c((1.0f64 / 3.0).sqrt(), 0.0), c((2.0f64 / 3.0).sqrt(), 0.0)]).expect("normalized")
}

/// Swap of the last two wires controlled by the first.
fn controlled_swap() -> Operator {
    let mut m = DMatrix::zeros(8, 8);
    for i in 0..8 {
        let j = if i >= 4 { 4 | ((i & 1) << 1) | ((i >> 1) & 1) } else { i };
        m[(j, i)] = c(1.0, 0.0);
    }
    Operator::from_matrix(m).expect("permutation matrix")
}

fn committed_state(bit: u8) -> Result<PureState> {
    let (phi00, phi01) = phi_invariant_states();
    Ok(match bit {
        0 => phi00.kron(&PureState::basis(1, 0)),
        1 => phi01.kron(&coin()).apply_on(&controlled_swap(), &[ANCILLA, 1, 2])?,
        _ => return input("the committed bit must be 0 or 1"),
    })
}

/// Alice's preparation before sending: for bit 1 the wire choice is
/// entangled with the ancilla through a controlled swap, so sending wires
/// 0 and 2 sends qubits (1,3) or (1,2).
fn prepare(net: &Network, bit: u8) -> Result<Lab<'_>> {
    let (phi00, phi01) = phi_invariant_states();
    let mut lab = Lab::new(net);
    lab.protocol_scope(|lab| -> Result<()> {
        let mut alice = lab.party(ALICE)?;
        match bit {
            0 => {
                alice.prepare(&phi00)?;
                alice.prepare(&PureState::basis(1, 0))?;
            }
            1 => {
                alice.prepare(&phi01)?;
                alice.prepare(&coin())?;
                alice.apply(&controlled_swap(), &[ANCILLA, 1, 2])?;
            }
            _ => return input("the committed bit must be 0 or 1"),
        }
        Ok(())
    })?;
    Ok(lab)
}

fn send_to_bob(lab: &mut Lab<'_>) -> Result<()> {
    lab.protocol_scope(|lab| -> Result<()> {
        for w in SENT {
            lab.party(ALICE)?.send(w, BOB)?;
        }
        Ok(())
    })
}

fn session(lab: Lab<'_>, bit: u8, choice: Option<WireChoice>) -> CommitmentSession<'_> {
    CommitmentSession {
        committer: ALICE,
        receiver: BOB,
        bit,
        choice,
        cheated: false,
        phase: Phase::Committed,
        lab,
    }
}

fn choice_of(ancilla: usize) -> WireChoice {
    if ancilla == 0 {
        WireChoice::FirstThird
    } else {
        WireChoice::FirstSecond
    }
}

/// Honest commitment with Alice's coin sampled.
pub fn commit<'n, R: Rng + ?Sized>(net: &'n Network, bit: u8, rng: &mut R) -> Result<CommitmentSession<'n>> {
    let mut lab = prepare(net, bit)?;
    let choice = if bit == 1 {
        let k = lab.protocol_scope(|lab| lab.party(ALICE)?.measure(&Povm::standard_basis(1), &[ANCILLA], rng))?;
        choice_of(k)
    } else {
        WireChoice::FirstThird
    };
    send_to_bob(&mut lab)?;
    Ok(session(lab, bit, Some(choice)))
}

/// Every honest commitment branch with its probability.
pub fn commit_exact(net: &Network, bit: u8) -> Result<Vec<(f64, CommitmentSession<'_>)>> {
    let mut lab = prepare(net, bit)?;
    if bit == 0 {
        send_to_bob(&mut lab)?;
        return Ok(vec![(1.0, session(lab, 0, Some(WireChoice::FirstThird)))]);
    }
    let branches = lab.protocol_scope(|lab| lab.party(ALICE)?.branches(&Povm::standard_basis(1), &[ANCILLA]))?;
    branches
        .into_iter()
        .map(|b| {
            let mut lab = b.lab;
            send_to_bob(&mut lab)?;
            Ok((b.probability, session(lab, 1, Some(choice_of(b.outcome)))))
        })
        .collect()
}

/// Bob's singlet/triplet probabilities on the two qubits he holds.
pub fn bob_probe(session: &CommitmentSession<'_>) -> Result<[f64; 2]> {
    session.require_committed()?;
    let mut lab = session.lab.clone();
    let p = lab.protocol_scope(|lab| lab.party(BOB)?.probabilities(&povm2_singlet_triplet(), &SENT))?;
    Ok([p[0], p[1]])
}

/// Bob measures singlet/triplet on his two qubits; true on `singlet`.
/// The session itself is left untouched.
pub fn bob_probe_sampled<R: Rng + ?Sized>(session: &CommitmentSession<'_>, rng: &mut R) -> Result<bool> {
    session.require_committed()?;
    let mut lab = session.lab.clone();
    Ok(lab.protocol_scope(|lab| lab.party(BOB)?.measure(&povm2_singlet_triplet(), &SENT, rng))? == 0)
}

/// [`bob_probe`] averaged over the honest branches of `bit`.
pub fn bob_probe_exact(net: &Network, bit: u8) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (w, s) in commit_exact(net, bit)? {
        let p = bob_probe(&s)?;
        out[0] += w * p[0];
        out[1] += w * p[1];
    }
    Ok(out)
}

/// Bob's reduced density operator averaged over the honest branches.
/// Ground truth.
pub fn bob_reduced_state(net: &Network, bit: u8) -> Result<DensityOperator> {
    let mut acc = Operator::zeros(2);
    for (w, s) in commit_exact(net, bit)? {
        acc = acc.add(&s.lab.reduced(&SENT)?.operator().scale(c(w, 0.0)));
    }
    DensityOperator::from_operator(acc)
}

/// Largest total-variation gap between the two bits' outcome distributions
/// over every invariant POVM on Bob's two qubits.
pub fn commitment_hiding_gap(net: &Network) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for povm in invariant_povms(SENT.len())? {
        let dist = |bit| -> Result<Vec<f64>> {
            let mut acc = vec![0.0; povm.len()];
            for (w, s) in commit_exact(net, bit)? {
                let mut lab = s.lab.clone();
                let p = lab.protocol_scope(|lab| lab.party(BOB)?.probabilities(&povm, &SENT))?;
                for (a, x) in acc.iter_mut().zip(p) {
                    *a += w * x;
                }
            }
            Ok(acc)
        };
        worst = worst.max(tv_distance(&dist(0)?, &dist(1)?));
    }
    Ok(worst)
}

/// Columns of `a` extended to an orthonormal basis of the whole space.
fn complete_basis(a: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = a.nrows();
    let mut cols: Vec<nalgebra::DVector<C64>> = a.column_iter().map(|col| col.into_owned()).collect();
    for k in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut v = nalgebra::DVector::<C64>::zeros(dim);
        v[k] = c(1.0, 0.0);
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / c(norm, 0.0));
        }
    }
    DMatrix::from_columns(&cols)
}

/// Bob's side first: rows index his qubits, columns Alice's kept wires.
fn bob_by_alice(psi: &PureState) -> Result<DMatrix<C64>> {
    let order: Vec<usize> = SENT.iter().chain(KEPT.iter()).copied().collect();
    let p = psi.permute(&order)?;
    let cols = 1 << KEPT.len();
    Ok(DMatrix::from_fn(1 << SENT.len(), cols, |b, a| p.amplitudes()[b * cols + a]))
}

/// A unitary on Alice's kept wires and ancilla taking her bit-0
/// commitment to the purified honest bit-1 commitment.
///
/// Both global states are decomposed across the Bob / Alice cut in the
/// eigenbasis of Bob's reduced state, which is the same for both bits, and
/// the Alice-side vectors are mapped onto each other.
pub fn cheat_unitary() -> Result<Operator> {
    static W: OnceLock<Operator> = OnceLock::new();
    if let Some(w) = W.get() {
        return Ok(w.clone());
    }
    let w = build_cheat_unitary()?;
    Ok(W.get_or_init(|| w).clone())
}

fn build_cheat_unitary() -> Result<Operator> {
    const TOL: f64 = 1e-10;
    let m0 = bob_by_alice(&committed_state(0)?)?;
    let m1 = bob_by_alice(&committed_state(1)?)?;
    let rho0 = &m0 * m0.adjoint();
    let rho1 = &m1 * m1.adjoint();
    if (&rho0 - &rho1).camax() > TOL {
        return Err(Error::Construction("Bob's reduced states differ between the bits".into()));
    }
    let (vals, vecs) = eigh_matrix(&rho0);
    let support: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > TOL).collect();
    let side = |m: &DMatrix<C64>| -> DMatrix<C64> {
        let cols: Vec<nalgebra::DVector<C64>> = support
            .iter()
            .map(|&i| {
                let row = vecs.column(i).adjoint() * m;
                row.transpose() / c(vals[i].sqrt(), 0.0)
            })
            .collect();
        DMatrix::from_columns(&cols)
    };
    let a0 = side(&m0);
    let a1 = side(&m1);
    for a in [&a0, &a1] {
        let gram = a.adjoint() * a;
        if (gram - DMatrix::<C64>::identity(support.len(), support.len())).camax() > 1e-8 {
            return Err(Error::Construction("Schmidt vectors are not orthonormal; ranks differ".into()));
        }
    }
    let b0 = complete_basis(&a0);
    let b1 = complete_basis(&a1);
    if b0.ncols() != b0.nrows() || b1.ncols() != b1.nrows() {
        return Err(Error::Construction("could not complete the Schmidt bases".into()));
    }
    Operator::from_matrix(&b1 * b0.adjoint())
}

/// Alice turns a bit-0 commitment into an undetectable bit-1 commitment.
pub fn cheat(session: &mut CommitmentSession<'_>) -> Result<()> {
    session.require_committed()?;
    if session.bit != 0 || session.cheated {
        return input("cheating starts from an honest bit-0 commitment");
    }
    let w = cheat_unitary()?;
    session.lab.protocol_scope(|lab| lab.party(ALICE)?.apply(&w, &KEPT))?;
    session.cheated = true;
    session.choice = None;
    Ok(())
}

/// Bob's order of the four qubits after receiving the rest, or `None` for
/// an announcement no honest Alice could make.
fn qubit_order(a: Announcement) -> Option<[usize; 4]> {
    match (a.bit, a.choice) {
        (0, WireChoice::FirstThird) | (1, WireChoice::FirstThird) => Some([0, 1, 2, 3]),
        // Bob's second wire carries qubit 2, Alice's wire 1 qubit 3.
        (1, WireChoice::FirstSecond) => Some([0, 2, 1, 3]),
        _ => None,
    }
}

/// Alice sends wires 1 and 3; Bob projects onto the announced state.
fn bob_accepts(lab: &mut Lab<'_>, a: Announcement) -> Result<f64> {
    let Some(order) = qubit_order(a) else {
        lab.note(BOB, "reject malformed announcement");
        return Ok(0.0);
    };
    let (phi00, phi01) = phi_invariant_states();
    let target = if a.bit == 0 { phi00 } else { phi01 };
    lab.protocol_scope(|lab| -> Result<f64> {
        let mut alice = lab.party(ALICE)?;
        alice.send(1, BOB)?;
        alice.send(3, BOB)?;
        Ok(lab.party(BOB)?.probabilities(&Povm::projective_test(&target), &order)?[0])
    })
}

/// Acceptance probability of a given announcement against the session,
/// without opening it.
pub fn verify_announcement(session: &CommitmentSession<'_>, a: Announcement) -> Result<f64> {
    session.require_committed()?;
    bob_accepts(&mut session.lab.clone(), a)
}

/// Alice's announcements for `claimed`, with probabilities, and the lab
/// after each.
fn announce<'n>(session: &CommitmentSession<'n>, claimed: u8) -> Result<Vec<(Announcement, f64, Lab<'n>)>> {
    if claimed > 1 {
        return input("the claimed bit must be 0 or 1");
    }
    if claimed == 0 {
        let a = Announcement {
            bit: 0,
            choice: WireChoice::FirstThird,
        };
        return Ok(vec![(a, 1.0, session.lab.clone())]);
    }
    if let Some(choice) = session.choice {
        return Ok(vec![(Announcement { bit: 1, choice }, 1.0, session.lab.clone())]);
    }
    let mut lab = session.lab.clone();
    let branches = lab.protocol_scope(|lab| lab.party(ALICE)?.branches(&Povm::standard_basis(1), &[ANCILLA]))?;
    Ok(branches
        .into_iter()
        .map(|b| {
            let a = Announcement {
                bit: 1,
                choice: choice_of(b.outcome),
            };
            (a, b.probability, b.lab)
        })
        .collect())
}

/// Alice opens as `claimed`; exact acceptance probability.
pub fn reveal_and_verify(session: &mut CommitmentSession<'_>, claimed: u8) -> Result<Opening> {
    session.require_committed()?;
    let mut accept = 0.0;
    let mut announcements = Vec::new();
    for (a, p, mut lab) in announce(session, claimed)? {
        accept += p * bob_accepts(&mut lab, a)?;
        announcements.push((a, p));
    }
    session.phase = Phase::Opened;
    Ok(Opening {
        claimed,
        accept_probability: accept,
        announcements,
    })
}

/// Alice opens as `claimed` with every measurement sampled.
pub fn reveal_sampled<R: Rng + ?Sized>(session: &mut CommitmentSession<'_>, claimed: u8, rng: &mut R) -> Result<bool> {
    session.require_committed()?;
    if claimed > 1 {
        return input("the claimed bit must be 0 or 1");
    }
    let mut lab = session.lab.clone();
    let choice = match (claimed, session.choice) {
        (0, _) => WireChoice::FirstThird,
        (_, Some(ch)) => ch,
        (_, None) => {
            let k = lab.protocol_scope(|lab| lab.party(ALICE)?.measure(&Povm::standard_basis(1), &[ANCILLA], rng))?;
            choice_of(k)
        }
    };
    let a = Announcement { bit: claimed, choice };
    let order = qubit_order(a).expect("honest announcement");
    let (phi00, phi01) = phi_invariant_states();
    let target = if claimed == 0 { phi00 } else { phi01 };
    let pass = lab.protocol_scope(|lab| -> Result<bool> {
        let mut alice = lab.party(ALICE)?;
        alice.send(1, BOB)?;
        alice.send(3, BOB)?;
        Ok(lab.party(BOB)?.measure(&Povm::projective_test(&target), &order, rng)? == 0)
    })?;
    session.lab = lab;
    session.phase = Phase::Opened;
    Ok(pass)
}
