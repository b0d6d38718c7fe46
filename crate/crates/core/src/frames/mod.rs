//! Ground truth of a communication world and what its parties can observe.

mod description;
mod lab;
mod network;
mod observables;
mod serial;

pub use description::{apply_local, transmit, LocalDescription};
pub use lab::{Branch, Event, Lab, Party};
pub use network::{FrameRestriction, Network, NetworkOptions, PartyId, ALICE, BOB, CHARLIE};
pub use observables::{
    is_known_to, loop_holonomy, observable_g1, observable_g2, wilson_trace, Knower, ObservableData,
    ObservableKind, ObservableValue,
};
pub use serial::{ChannelRecord, NetworkRecord};

pub(crate) use network::oracle_access;
pub(crate) use observables::check_route;
