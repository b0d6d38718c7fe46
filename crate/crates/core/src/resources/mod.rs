//! Shared resources built through the actual channels: ebits, GHZ
//! variants and refbits, plus a search for local unitaries relating two
//! resources.
//!
//! Joint states here are written wire by wire in the basis of whoever holds
//! the wire, the "holder basis". Constructing them needs ground truth, so
//! these functions are oracles for tests and reports; the protocols
//! themselves run inside a [`Lab`](crate::frames::Lab).

mod ebit;
mod equivalence;
mod ghz;
mod refbit;

pub use ebit::{convert_ebit, ebit_classes_interconvert, make_ebit, mixed_basis_singlet_overlap, EbitForm, EbitSpec};
pub use equivalence::{
    lu_equivalence, lu_equivalence_ensemble, EquivalenceVerdict, LuOptions, Verdict, EQUIVALENCE_TOL,
};
pub use ghz::{correct_outcome1, dressed_ghz, ghz_branches, ghz_from_singlets, Corrector, GhzDressing, GhzVariant};
pub use refbit::{make_refbit, Refbit};
