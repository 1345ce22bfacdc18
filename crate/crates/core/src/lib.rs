//! Anytime decision making under interval-valued probability.
//!
//! Beliefs about the conditions of a decision problem are held as a credal
//! set: the solution set of a linear system over nonnegative unknowns that
//! sum to one. An action survives as long as it maximizes expected utility
//! for at least one member of that set (E-admissibility), which is decided
//! exactly by rational linear-feasibility tests in [`kernel`].
//!
//! Three knowledge backends narrow the credal set step by step:
//!
//! - [`deduction`]: interval inference rules over propositional sentences.
//! - [`worlds`]: possible-worlds linear systems grown one sentence at a time.
//! - [`pdb`]: probabilistic databases projected onto a ladder of schemes.
//!
//! [`decide`] ties them to decision problems and emits a non-increasing
//! sequence of admissible sets. [`maxent`] measures how far maximum-entropy
//! point estimates sit from the centroid of small solution sets.

pub mod decide;
pub mod deduction;
pub mod error;
pub mod format;
pub mod kernel;
pub mod logic;
pub mod maxent;
pub mod pdb;
pub mod worlds;

pub use error::{Error, Result};
pub use kernel::{Interval, LinearConstraint, LinearSystem, Rational, Relation};
pub use logic::Formula;
