//! Exhaustive search for nontrivial actions of `SAut(F_n)` on small sets.

pub mod atlas;
pub mod control;
pub mod error;
pub mod free_aut;
pub mod hom;
pub mod orchestrator;
pub mod group;
pub mod perm;
pub mod relations;
pub mod search;
pub mod sources;

pub use error::{Error, Result};
pub use perm::{CycleType, Parity, Permutation};
