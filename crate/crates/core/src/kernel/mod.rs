//! Exact rational scalars, probability intervals, linear systems and the
//! simplex oracle every other module builds on.

mod interval;
mod rational;
mod simplex;
mod system;
mod vertices;

pub use interval::Interval;
pub(crate) use rational::is_probability;
pub use rational::{format_rational, parse_rational, ratio, serde_rational, to_f64, Rational};
pub use simplex::{lp_feasible, lp_feasible_point, lp_optimize, LpSolution, Sense};
pub use system::{LinearConstraint, LinearSystem, Relation};
pub use vertices::enumerate_vertices;
