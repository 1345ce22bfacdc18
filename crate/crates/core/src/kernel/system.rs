use std::fmt;

use num_traits::{One, Zero};

use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Le => lhs <= rhs,
        }
    }

    pub fn flipped(self) -> Relation {
        match self {
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
            Relation::Le => Relation::Ge,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        }
    }
}

/// One row `coefficients · x (=|>=|<=) rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint { coefficients, relation, rhs }
    }

    /// Sum of the variables at `indices` compared against `rhs`.
    pub fn sum_of(variable_count: usize, indices: &[usize], relation: Relation, rhs: Rational) -> Self {
        let mut coefficients = vec![Rational::zero(); variable_count];
        for &i in indices {
            coefficients[i] += Rational::one();
        }
        LinearConstraint { coefficients, relation, rhs }
    }

    pub fn lhs_at(&self, point: &[Rational]) -> Rational {
        self.coefficients.iter().zip(point).map(|(a, x)| a * x).sum()
    }

    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        self.relation.holds(&self.lhs_at(point), &self.rhs)
    }

    /// Multiplies both sides by `factor`, flipping the relation for negative factors.
    pub fn scaled(&self, factor: &Rational) -> LinearConstraint {
        let relation = if *factor < Rational::zero() { self.relation.flipped() } else { self.relation };
        LinearConstraint {
            coefficients: self.coefficients.iter().map(|a| a * factor).collect(),
            relation,
            rhs: &self.rhs * factor,
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if a.is_one() {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "({})x{}", format_rational(a), i + 1)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, " {} {}", self.relation.symbol(), format_rational(&self.rhs))
    }
}

/// Constraints over `variable_count` unknowns. With `nonneg` every unknown is
/// implicitly `>= 0`; with `normalized` the unit-sum row is implied and kept
/// out of `constraints`, so it is present exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub variable_count: usize,
    pub constraints: Vec<LinearConstraint>,
    pub nonneg: bool,
    pub normalized: bool,
}

impl LinearSystem {
    /// Probability simplex over `variable_count` unknowns.
    pub fn simplex(variable_count: usize) -> Self {
        LinearSystem { variable_count, constraints: Vec::new(), nonneg: true, normalized: true }
    }

    /// No implicit rows at all besides nonnegativity.
    pub fn unnormalized(variable_count: usize) -> Self {
        LinearSystem { variable_count, constraints: Vec::new(), nonneg: true, normalized: false }
    }

    pub fn with_nonneg(mut self, nonneg: bool) -> Self {
        self.nonneg = nonneg;
        self
    }

    pub fn push(&mut self, constraint: LinearConstraint) {
        self.constraints.push(constraint);
    }

    pub fn with(mut self, constraint: LinearConstraint) -> Self {
        self.constraints.push(constraint);
        self
    }

    pub fn extended(&self, extra: impl IntoIterator<Item = LinearConstraint>) -> Self {
        let mut out = self.clone();
        out.constraints.extend(extra);
        out
    }

    pub fn unit_sum_row(&self) -> LinearConstraint {
        LinearConstraint::new(vec![Rational::one(); self.variable_count], Relation::Eq, Rational::one())
    }

    /// Every explicit row, followed by the unit-sum row when normalized.
    pub fn all_constraints(&self) -> Vec<LinearConstraint> {
        let mut rows = self.constraints.clone();
        if self.normalized {
            rows.push(self.unit_sum_row());
        }
        rows
    }

    pub fn validate(&self) -> Result<()> {
        if self.variable_count == 0 {
            return Err(Error::MalformedSystem("variable count must be positive".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != self.variable_count {
                return Err(Error::MalformedSystem(format!(
                    "row {i} has {} coefficients, expected {}",
                    c.coefficients.len(),
                    self.variable_count
                )));
            }
        }
        Ok(())
    }

    /// Exact membership test, including the implicit rows.
    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.variable_count
            && (!self.nonneg || point.iter().all(|x| *x >= Rational::zero()))
            && self.all_constraints().iter().all(|c| c.is_satisfied_by(point))
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.all_constraints() {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
