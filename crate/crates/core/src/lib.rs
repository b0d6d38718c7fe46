//! Exact simulation of quantum communication between parties that hold
//! private SU(2) reference frames and exchange qubits over fixed,
//! direction-dependent unitary channels.
//!
//! Layers, bottom up:
//!
//! * [`qmath`]: dense linear algebra on at most six qubits.
//! * [`frames`]: the ground-truth [`Network`](frames::Network), the three
//!   observable classes, and the party-capability [`Lab`](frames::Lab) that
//!   gates what each party may know or do.
//! * [`gaugefield`]: discretized su(2) connections, path-ordered transport,
//!   lattice gauge transforms and Wilson loops.
//! * [`invariants`]: Bell basis and POVMs that commute with collective
//!   rotations on 2, 3 and 4 qubits.
//! * [`resources`]: ebits, GHZ variants, refbits and a local-unitary
//!   equivalence search.
//! * [`protocols`]: data hiding, refbit-assisted superdense coding and a
//!   bit-commitment attempt with its perfect cheat.

pub mod error;
pub mod frames;
pub mod gaugefield;
pub mod invariants;
pub mod protocols;
pub mod qmath;
pub mod resources;
pub mod seeding;

pub use error::{Error, Result};
