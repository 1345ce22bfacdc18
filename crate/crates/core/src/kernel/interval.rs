use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, is_probability, Rational};
use crate::error::{Error, Result};

/// Closed probability interval `[lower, upper]` with `0 <= lower <= upper <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lower: Rational,
    upper: Rational,
}

impl Interval {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self> {
        if !is_probability(&lower) || !is_probability(&upper) || lower > upper {
            return Err(Error::InvalidInterval { lower: format_rational(&lower), upper: format_rational(&upper) });
        }
        Ok(Interval { lower, upper })
    }

    /// The vacuous interval `[0, 1]`.
    pub fn unit() -> Self {
        Interval { lower: Rational::zero(), upper: Rational::one() }
    }

    pub fn point(value: Rational) -> Result<Self> {
        Self::new(value.clone(), value)
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }

    pub fn is_unit(&self) -> bool {
        self.lower.is_zero() && self.upper.is_one()
    }

    pub fn contains(&self, value: &Rational) -> bool {
        &self.lower <= value && value <= &self.upper
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }

    /// Componentwise `[max, min]`; `None` when the intervals are disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lower = (&self.lower).max(&other.lower).clone();
        let upper = (&self.upper).min(&other.upper).clone();
        (lower <= upper).then_some(Interval { lower, upper })
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(2.into())
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lower), format_rational(&self.upper))
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    #[serde(with = "super::rational::serde_rational")]
    lower: Rational,
    #[serde(with = "super::rational::serde_rational")]
    upper: Rational,
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        IntervalRepr { lower: self.lower.clone(), upper: self.upper.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = IntervalRepr::deserialize(deserializer)?;
        Interval::new(repr.lower, repr.upper).map_err(serde::de::Error::custom)
    }
}
