//! Party capabilities: the only way protocol code touches the world.
//!
//! A [`Lab`] holds the physical register in the hidden fiducial basis and
//! records which party holds each wire. Parties act through [`Party`]
//! handles, always in their own basis; they never see frames or channels
//! and may only read observables that [`is_known_to`] grants them.

use std::marker::PhantomData;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::description::LocalDescription;
use super::network::{oracle_access, Network, PartyId, ProtocolGuard};
use super::observables::{self, is_known_to, ObservableValue};
use crate::error::{input, Error, Result};
use crate::invariants::Povm;
use crate::qmath::{DensityOperator, Operator, PureState, Su2, C64, STRUCT_TOL};

/// One line of a protocol transcript.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub party: PartyId,
    pub action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probability: Option<f64>,
}

/// A measurement branch with its exact probability and post-measurement lab.
pub struct Branch<'n> {
    pub outcome: usize,
    pub label: String,
    pub probability: f64,
    pub lab: Lab<'n>,
}

#[derive(Clone)]
pub struct Lab<'n> {
    net: &'n Network,
    state: PureState,
    holders: Vec<PartyId>,
    log: Vec<Event>,
    // Sessions are single-owner and tied to the thread's protocol guard.
    _not_send: PhantomData<*const ()>,
}

impl<'n> Lab<'n> {
    pub fn new(net: &'n Network) -> Self {
        Self {
            net,
            state: PureState::basis(0, 0),
            holders: Vec::new(),
            log: Vec::new(),
            _not_send: PhantomData,
        }
    }

    /// Lab whose register, written wire by wire in each holder's basis, is
    /// `state`. Ground truth: the conversion needs every holder's frame.
    pub fn from_holder_state(net: &'n Network, state: &PureState, holders: Vec<PartyId>) -> Result<Self> {
        oracle_access("a register in holder bases")?;
        if holders.len() != state.n_qubits() {
            return input("one holder per wire is required");
        }
        for &h in &holders {
            net.check_party(h)?;
        }
        let frames: Vec<Su2> = holders.iter().map(|&h| net.frame_raw(h)).collect();
        Ok(Self {
            net,
            state: state.apply(&Operator::product(&frames))?,
            holders,
            log: Vec::new(),
            _not_send: PhantomData,
        })
    }

    pub fn network(&self) -> &'n Network {
        self.net
    }

    /// Runs `f` as protocol code: ground-truth accessors fail inside it.
    pub fn protocol_scope<T>(&mut self, f: impl FnOnce(&mut Self) -> T) -> T {
        let _guard = ProtocolGuard::enter();
        f(self)
    }

    pub fn party(&mut self, id: PartyId) -> Result<Party<'_, 'n>> {
        self.net.check_party(id)?;
        Ok(Party { lab: self, id })
    }

    pub fn n_wires(&self) -> usize {
        self.holders.len()
    }

    pub fn holder(&self, wire: usize) -> Result<PartyId> {
        self.holders
            .get(wire)
            .copied()
            .ok_or_else(|| Error::Input(format!("no wire {wire}")))
    }

    pub fn wires_of(&self, party: PartyId) -> Vec<usize> {
        (0..self.n_wires()).filter(|&w| self.holders[w] == party).collect()
    }

    pub fn transcript(&self) -> &[Event] {
        &self.log
    }

    pub fn into_transcript(self) -> Vec<Event> {
        self.log
    }

    /// Register in the hidden fiducial basis. Ground truth.
    pub fn fiducial_state(&self) -> Result<&PureState> {
        oracle_access("the fiducial register")?;
        Ok(&self.state)
    }

    /// Whole register re-expressed in `party`'s basis. Ground truth.
    pub fn view(&self, party: PartyId) -> Result<LocalDescription> {
        oracle_access("a party-basis view")?;
        self.net.check_party(party)?;
        let rebase = Operator::tensor_power(&self.net.frame_raw(party).adjoint(), self.n_wires());
        let state = self.state.apply(&rebase)?;
        Ok(LocalDescription::new(party, state))
    }

    /// Each wire written in its current holder's basis. Ground truth.
    pub fn holder_view(&self) -> Result<PureState> {
        oracle_access("a holder-basis view")?;
        let ops: Vec<Su2> = self
            .holders
            .iter()
            .map(|&h| self.net.frame_raw(h).adjoint())
            .collect();
        self.state.apply(&Operator::product(&ops))
    }

    /// Reduced density operator of `wires`, basis-independent content only
    /// when followed by an invariant test. Ground truth.
    pub fn reduced(&self, wires: &[usize]) -> Result<DensityOperator> {
        oracle_access("a reduced state")?;
        self.state.density().partial_trace(wires)
    }

    fn frame_power(&self, party: PartyId, m: usize) -> Operator {
        Operator::tensor_power(&self.net.frame_raw(party), m)
    }

    /// Operator given in `party`'s basis on `m` wires, as a physical operator.
    fn to_physical(&self, party: PartyId, op: &Operator) -> Operator {
        let f = self.frame_power(party, op.n_qubits());
        f.compose(op).compose(&f.adjoint())
    }

    fn log(&mut self, party: PartyId, action: String, outcome: Option<String>, probability: Option<f64>) {
        self.log.push(Event {
            party,
            action,
            outcome,
            probability,
        });
    }

    /// Appends a free-standing note to the transcript.
    pub fn note(&mut self, party: PartyId, action: impl Into<String>) {
        self.log(party, action.into(), None, None);
    }
}

/// Capability of a single party inside a [`Lab`].
pub struct Party<'a, 'n> {
    lab: &'a mut Lab<'n>,
    id: PartyId,
}

impl<'a, 'n> Party<'a, 'n> {
    pub fn id(&self) -> PartyId {
        self.id
    }

    fn check_holds(&self, wires: &[usize]) -> Result<()> {
        crate::qmath::check_wires(wires, self.lab.n_wires())?;
        for &w in wires {
            if self.lab.holders[w] != self.id {
                return Err(Error::ProtocolViolation(format!(
                    "{} does not hold wire {w} (held by {})",
                    self.id, self.lab.holders[w]
                )));
            }
        }
        Ok(())
    }

    /// Prepares `state` (coefficients in this party's basis) on fresh wires.
    pub fn prepare(&mut self, state: &PureState) -> Result<Vec<usize>> {
        let m = state.n_qubits();
        let start = self.lab.n_wires();
        if start + m > crate::qmath::MAX_QUBITS {
            return input("register would exceed the supported size");
        }
        let f = self.lab.net.frame_raw(self.id);
        let mut physical = state.clone();
        for w in 0..m {
            physical = physical.apply_su2(&f, w)?;
        }
        self.lab.state = self.lab.state.kron(&physical);
        self.lab.holders.extend(std::iter::repeat_n(self.id, m));
        let wires: Vec<usize> = (start..start + m).collect();
        self.lab.log(self.id, format!("prepare {m}-qubit state on wires {wires:?}"), None, None);
        Ok(wires)
    }

    /// Applies `gate`, written in this party's basis, to held wires.
    pub fn apply(&mut self, gate: &Operator, wires: &[usize]) -> Result<()> {
        self.check_holds(wires)?;
        if !gate.is_unitary(STRUCT_TOL) {
            return input("local gate must be unitary");
        }
        let physical = self.lab.to_physical(self.id, gate);
        self.lab.state = self.lab.state.apply_on(&physical, wires)?;
        self.lab.log(self.id, format!("apply gate to wires {wires:?}"), None, None);
        Ok(())
    }

    pub fn apply_su2(&mut self, u: &Su2, wire: usize) -> Result<()> {
        self.apply(&Operator::from_su2(u), &[wire])
    }

    /// Sends a held wire through the channel to `to`.
    pub fn send(&mut self, wire: usize, to: PartyId) -> Result<()> {
        self.check_holds(&[wire])?;
        self.lab.net.check_party(to)?;
        if to == self.id {
            return input("cannot send a qubit to oneself");
        }
        let v = self.lab.net.channel_raw(to, self.id);
        self.lab.state = self.lab.state.apply_su2(&v, wire)?;
        self.lab.holders[wire] = to;
        self.lab.log(self.id, format!("send wire {wire} to {to}"), None, None);
        Ok(())
    }

    /// The register with `wires` re-expressed in this party's basis.
    fn local_view(&self, povm: &Povm, wires: &[usize]) -> Result<PureState> {
        self.check_holds(wires)?;
        if povm.n_qubits() != wires.len() {
            return input(format!(
                "POVM acts on {} qubits but {} wires given",
                povm.n_qubits(),
                wires.len()
            ));
        }
        let f = self.lab.net.frame_raw(self.id).adjoint();
        let mut local = self.lab.state.clone();
        for &w in wires {
            local = local.apply_su2(&f, w)?;
        }
        Ok(local)
    }

    /// Unnormalized post-measurement state of outcome `i`, back in the
    /// physical frame.
    fn collapse(&self, local: &PureState, povm: &Povm, i: usize, wires: &[usize]) -> Result<PureState> {
        let f = self.lab.net.frame_raw(self.id);
        let mut post = local.apply_on(povm.kraus(i), wires)?;
        for &w in wires {
            post = post.apply_su2(&f, w)?;
        }
        Ok(post)
    }

    fn weights(local: &PureState, povm: &Povm, wires: &[usize]) -> Result<Vec<f64>> {
        (0..povm.len())
            .map(|i| Ok(local.apply_on(povm.kraus(i), wires)?.norm().powi(2)))
            .collect()
    }

    /// Exact outcome distribution of `povm` (in this party's basis) on held wires.
    pub fn probabilities(&self, povm: &Povm, wires: &[usize]) -> Result<Vec<f64>> {
        let local = self.local_view(povm, wires)?;
        Self::weights(&local, povm, wires)
    }

    /// Every outcome with nonzero probability, each with its collapsed lab.
    pub fn branches(&self, povm: &Povm, wires: &[usize]) -> Result<Vec<Branch<'n>>> {
        let local = self.local_view(povm, wires)?;
        let mut out = Vec::new();
        for (i, p) in Self::weights(&local, povm, wires)?.into_iter().enumerate() {
            if p <= 1e-15 {
                continue;
            }
            let post = self.collapse(&local, povm, i, wires)?;
            let mut lab = self.lab.clone();
            lab.state = PureState::from_dvector_unchecked(post.amplitudes() / crate::qmath::c(p.sqrt(), 0.0));
            lab.log(
                self.id,
                format!("measure wires {wires:?}"),
                Some(povm.label(i).to_string()),
                Some(p),
            );
            out.push(Branch {
                outcome: i,
                label: povm.label(i).to_string(),
                probability: p,
                lab,
            });
        }
        Ok(out)
    }

    /// Samples an outcome and collapses the register.
    pub fn measure<R: Rng + ?Sized>(&mut self, povm: &Povm, wires: &[usize], rng: &mut R) -> Result<usize> {
        let local = self.local_view(povm, wires)?;
        let weights = Self::weights(&local, povm, wires)?;
        let total: f64 = weights.iter().sum();
        let mut draw = rng.random::<f64>() * total;
        let mut pick = weights.len() - 1;
        for (i, p) in weights.iter().enumerate() {
            if draw < *p {
                pick = i;
                break;
            }
            draw -= p;
        }
        let p = weights[pick];
        let post = self.collapse(&local, povm, pick, wires)?;
        self.lab.state = PureState::from_dvector_unchecked(post.amplitudes() / crate::qmath::c(p.sqrt(), 0.0));
        self.lab.log(
            self.id,
            format!("measure wires {wires:?}"),
            Some(povm.label(pick).to_string()),
            Some(p),
        );
        Ok(pick)
    }

    /// Evaluates an observable and hands it over only if this party may know it.
    fn gated(&mut self, obs: ObservableValue, what: &str) -> Result<ObservableValue> {
        if !is_known_to(self.id, &obs) {
            return Err(Error::ProtocolViolation(format!("{} cannot know {what}", self.id)));
        }
        self.lab.log(self.id, format!("observe {what}"), None, None);
        Ok(obs)
    }

    /// Holonomy of a closed route in this party's own basis. The route must
    /// be based at this party.
    pub fn holonomy(&mut self, route: &[PartyId]) -> Result<Su2> {
        let h = observables::holonomy_raw(self.lab.net, route)?;
        let obs = ObservableValue {
            kind: observables::ObservableKind::PrivateFrameIndependent,
            value: observables::ObservableData::Matrix(h),
            owner: observables::Knower::Party(route[0]),
        };
        let names: Vec<String> = route.iter().map(|p| p.name()).collect();
        Ok(self
            .gated(obs, &format!("holonomy {}", names.join("->")))?
            .matrix()
            .expect("holonomy is a matrix"))
    }

    /// Public Wilson trace of a closed route.
    pub fn wilson(&mut self, route: &[PartyId]) -> Result<C64> {
        let obs = observables::wilson_raw(self.lab.net, route)?;
        Ok(self.gated(obs, "Wilson trace")?.scalar().expect("scalar"))
    }

    /// Matrix element of the channel from `sender`, who prepared `psi` in
    /// their basis; this party projects onto `phi`.
    pub fn matrix_element_from(&mut self, sender: PartyId, phi: &PureState, psi: &PureState) -> Result<C64> {
        let obs = observables::g1_raw(self.lab.net, sender, self.id, phi, psi)?;
        Ok(self.gated(obs, "a channel matrix element")?.scalar().expect("scalar"))
    }

    /// Asks to read an arbitrary observable; refused unless known to this party.
    pub fn read(&mut self, obs: ObservableValue) -> Result<ObservableValue> {
        self.gated(obs, "an observable")
    }
}
