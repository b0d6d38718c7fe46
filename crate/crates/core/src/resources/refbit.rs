use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::frames::{transmit, LocalDescription, Network, PartyId};
use crate::qmath::PureState;

/// A single qubit prepared by one party and held by another.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refbit {
    pub preparer: PartyId,
    pub holder: PartyId,
    /// Coefficients in the preparer's basis.
    pub prepared: PureState,
}

/// `preparer` makes `psi` in their basis and sends it to `holder`. Also
/// returns the holder's description of what arrived.
pub fn make_refbit(
    net: &Network,
    preparer: PartyId,
    holder: PartyId,
    psi: &PureState,
) -> Result<(Refbit, LocalDescription)> {
    if psi.n_qubits() != 1 {
        return input("a refbit is a single qubit");
    }
    let sent = LocalDescription::new(preparer, psi.clone());
    let received = transmit(net, preparer, holder, &sent, 0)?;
    Ok((
        Refbit {
            preparer,
            holder,
            prepared: psi.clone(),
        },
        received,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{FrameRestriction, ALICE, BOB, CHARLIE};
    use crate::qmath::{c, Operator};

    fn plus() -> PureState {
        PureState::superposition(&[(c(1.0, 0.0), "0"), (c(1.0, 0.0), "1")]).unwrap()
    }

    #[test]
    fn identity_network_delivers_verbatim() {
        let net = Network::trivial(2).unwrap();
        let (r, got) = make_refbit(&net, ALICE, BOB, &plus()).unwrap();
        assert_eq!(got.owner, BOB);
        assert!((got.state.amplitudes() - plus().amplitudes()).norm() < 1e-15);
        assert_eq!(r.prepared, plus());
    }

    #[test]
    fn received_state_is_the_channel_image() {
        let net = Network::build(17, 3, FrameRestriction::Full).unwrap();
        for to in [ALICE, BOB] {
            let (_, got) = make_refbit(&net, CHARLIE, to, &plus()).unwrap();
            let link = net.frame(to).unwrap().adjoint() * net.channel(to, CHARLIE).unwrap() * net.frame(CHARLIE).unwrap();
            let want = plus().apply(&Operator::from_su2(&link)).unwrap();
            assert!(got.state.overlap(&want).unwrap() > 1.0 - 1e-12);
            assert_eq!(got.state.density().rank(1e-9), 1);
        }
    }

    #[test]
    fn rejects_multi_qubit_and_self_sends() {
        let net = Network::trivial(2).unwrap();
        assert!(make_refbit(&net, ALICE, BOB, &PureState::basis(2, 0)).is_err());
        assert!(make_refbit(&net, ALICE, ALICE, &plus()).is_err());
    }
}
