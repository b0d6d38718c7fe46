//! The three observable classes and who may know them.
//!
//! The free functions here evaluate against ground truth and are refused
//! inside protocol code; parties reach the same quantities through
//! [`Party`](super::Party), which applies [`is_known_to`].

use serde::{Deserialize, Serialize};

use super::network::{oracle_access, Network, PartyId};
use crate::error::{input, Result};
use crate::qmath::{PureState, Su2, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// Depends on other parties' frames, e.g. a matrix element of a
    /// one-way channel.
    PrivateFrameDependent,
    /// Depends only on the owner's own frame, e.g. a loop holonomy.
    PrivateFrameIndependent,
    /// Independent of every frame, e.g. a Wilson trace.
    PublicFrameIndependent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knower {
    Party(PartyId),
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableData {
    Scalar(C64),
    Matrix(Su2),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableValue {
    pub kind: ObservableKind,
    pub value: ObservableData,
    pub owner: Knower,
}

impl ObservableValue {
    pub fn scalar(&self) -> Option<C64> {
        match self.value {
            ObservableData::Scalar(z) => Some(z),
            ObservableData::Matrix(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<Su2> {
        match self.value {
            ObservableData::Matrix(m) => Some(m),
            ObservableData::Scalar(_) => None,
        }
    }
}

/// Public values are known to everyone, private ones only to their owner.
pub fn is_known_to(party: PartyId, obs: &ObservableValue) -> bool {
    obs.kind == ObservableKind::PublicFrameIndependent || obs.owner == Knower::Party(party)
}

fn qubit(state: &PureState, what: &str) -> Result<[C64; 2]> {
    if state.n_qubits() != 1 {
        return input(format!("{what} must be a single-qubit state"));
    }
    let a = state.amplitudes();
    Ok([a[0], a[1]])
}

fn bra_ket(phi: [C64; 2], m: &Su2, psi: [C64; 2]) -> C64 {
    let v = m.apply(psi);
    phi[0].conj() * v[0] + phi[1].conj() * v[1]
}

pub(crate) fn g1_raw(net: &Network, a: PartyId, b: PartyId, phi: &PureState, psi: &PureState) -> Result<ObservableValue> {
    net.check_party(a)?;
    net.check_party(b)?;
    if a == b {
        return input("sender and receiver must differ");
    }
    let value = bra_ket(qubit(phi, "phi")?, &net.link(b, a), qubit(psi, "psi")?);
    Ok(ObservableValue {
        kind: ObservableKind::PrivateFrameDependent,
        value: ObservableData::Scalar(value),
        owner: Knower::Party(b),
    })
}

pub(crate) fn g2_raw(
    net: &Network,
    a: PartyId,
    b: PartyId,
    u_b: &Su2,
    phi: &PureState,
    psi: &PureState,
) -> Result<ObservableValue> {
    net.check_party(a)?;
    net.check_party(b)?;
    if a == b {
        return input("sender and returner must differ");
    }
    let m = net.link(a, b) * *u_b * net.link(b, a);
    let value = bra_ket(qubit(phi, "phi")?, &m, qubit(psi, "psi")?);
    Ok(ObservableValue {
        kind: ObservableKind::PrivateFrameDependent,
        value: ObservableData::Scalar(value),
        owner: Knower::Party(a),
    })
}

/// Validates a closed route `[k, …, k]` with at least two hops.
pub(crate) fn check_route(net: &Network, route: &[PartyId]) -> Result<()> {
    if route.len() < 3 {
        return input("a loop needs at least two hops");
    }
    if route.first() != route.last() {
        return input("route must start and end at the same party");
    }
    for &p in route {
        net.check_party(p)?;
    }
    if route.windows(2).any(|w| w[0] == w[1]) {
        return input("consecutive stops on a route must differ");
    }
    Ok(())
}

/// Ordered product of links along `route`, in the base party's basis.
pub(crate) fn holonomy_raw(net: &Network, route: &[PartyId]) -> Result<Su2> {
    check_route(net, route)?;
    Ok(route
        .windows(2)
        .fold(Su2::identity(), |acc, hop| net.link(hop[1], hop[0]) * acc))
}

/// `⟨φ_B|V_BA R_AB|ψ_B⟩`: Alice sends `ψ` prepared in her frame, Bob
/// projects onto `φ` in his.
pub fn observable_g1(net: &Network, a: PartyId, b: PartyId, phi: &PureState, psi: &PureState) -> Result<ObservableValue> {
    oracle_access("a frame-dependent matrix element")?;
    g1_raw(net, a, b, phi, psi)
}

/// `⟨φ_A|V_AB U_BB V_BA|ψ_A⟩`: Bob applies `u_b` (in his frame) before
/// returning the qubit.
pub fn observable_g2(
    net: &Network,
    a: PartyId,
    b: PartyId,
    u_b: &Su2,
    phi: &PureState,
    psi: &PureState,
) -> Result<ObservableValue> {
    oracle_access("a frame-dependent matrix element")?;
    g2_raw(net, a, b, u_b, phi, psi)
}

/// Holonomy of a closed route, e.g. `[A, B, C, A]` gives `V_AC V_CB V_BA`
/// written in Alice's basis.
pub fn loop_holonomy(net: &Network, route: &[PartyId]) -> Result<ObservableValue> {
    oracle_access("a holonomy evaluation")?;
    let h = holonomy_raw(net, route)?;
    Ok(ObservableValue {
        kind: ObservableKind::PrivateFrameIndependent,
        value: ObservableData::Matrix(h),
        owner: Knower::Party(route[0]),
    })
}

pub(crate) fn wilson_raw(net: &Network, route: &[PartyId]) -> Result<ObservableValue> {
    let w = holonomy_raw(net, route)?.trace();
    Ok(ObservableValue {
        kind: ObservableKind::PublicFrameIndependent,
        value: ObservableData::Scalar(w),
        owner: Knower::All,
    })
}

/// Trace of the loop holonomy; independent of base point and of all frames.
pub fn wilson_trace(net: &Network, route: &[PartyId]) -> Result<ObservableValue> {
    oracle_access("a Wilson trace evaluation")?;
    wilson_raw(net, route)
}
