//! Propositional sentences and exhaustive-model consistency checking.
//!
//! Atoms are opaque names compared case-sensitively; a sentence such as
//! `"Temperature > 85"` is one atom, not arithmetic.

pub(crate) mod eval;
mod formula;
mod parse;

pub use eval::{consistent, consistent_with_cap, evaluate, Assignment, DEFAULT_ATOM_CAP};
pub use formula::Formula;
