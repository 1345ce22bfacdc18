//! Dense two-phase simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! basic variable among tied ratios), so every call terminates.

use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::system::{LinearConstraint, LinearSystem, Relation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub point: Vec<Rational>,
}

/// True iff the system (with its implicit rows) has a solution.
pub fn lp_feasible(system: &LinearSystem) -> Result<bool> {
    Ok(lp_feasible_point(system)?.is_some())
}

/// A feasible point, if one exists.
pub fn lp_feasible_point(system: &LinearSystem) -> Result<Option<Vec<Rational>>> {
    system.validate()?;
    let mut tableau = Tableau::from_system(system);
    if !tableau.phase_one() {
        return Ok(None);
    }
    Ok(Some(tableau.original_point()))
}

/// Exact optimum of `objective · x` over the solution set.
pub fn lp_optimize(system: &LinearSystem, objective: &[Rational], sense: Sense) -> Result<LpSolution> {
    system.validate()?;
    if objective.len() != system.variable_count {
        return Err(Error::MalformedSystem(format!(
            "objective has {} coefficients, expected {}",
            objective.len(),
            system.variable_count
        )));
    }
    let mut tableau = Tableau::from_system(system);
    if !tableau.phase_one() {
        return Err(Error::Infeasible);
    }
    let mut cost = vec![Rational::zero(); tableau.width];
    for (i, c) in objective.iter().enumerate() {
        let c = match sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c,
        };
        if !tableau.nonneg {
            cost[tableau.variable_count + i] = -&c;
        }
        cost[i] = c;
    }
    let artificial_start = tableau.artificial_start;
    if !tableau.optimize(&cost, |j| j < artificial_start) {
        return Err(Error::Unbounded);
    }
    let point = tableau.original_point();
    let value = LinearConstraint::new(objective.to_vec(), Relation::Eq, Rational::zero()).lhs_at(&point);
    Ok(LpSolution { value, point })
}

struct Tableau {
    /// Each row holds `width` column entries followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
    artificial_start: usize,
    variable_count: usize,
    nonneg: bool,
}

impl Tableau {
    fn from_system(system: &LinearSystem) -> Self {
        let n = system.variable_count;
        let structural = if system.nonneg { n } else { 2 * n };
        let mut normalized: Vec<(Vec<Rational>, Relation, Rational)> = system
            .all_constraints()
            .into_iter()
            .map(|c| {
                let mut coeffs = c.coefficients.clone();
                if !system.nonneg {
                    coeffs.extend(c.coefficients.iter().map(|a| -a));
                }
                (coeffs, c.relation, c.rhs)
            })
            .collect();
        for (coeffs, relation, rhs) in normalized.iter_mut() {
            if rhs.is_negative() {
                coeffs.iter_mut().for_each(|a| *a = -&*a);
                *rhs = -&*rhs;
                *relation = relation.flipped();
            }
        }
        let slacks = normalized.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let artificials = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let artificial_start = structural + slacks;
        let width = artificial_start + artificials;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let (mut next_slack, mut next_artificial) = (structural, artificial_start);
        for (coeffs, relation, rhs) in normalized {
            let mut row = vec![Rational::zero(); width + 1];
            for (j, a) in coeffs.into_iter().enumerate() {
                row[j] = a;
            }
            row[width] = rhs;
            match relation {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_artificial] = Rational::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = Rational::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, width, artificial_start, variable_count: n, nonneg: system.nonneg }
    }

    /// Drives the artificial columns to zero. Returns false when infeasible.
    /// On success no artificial variable remains basic.
    fn phase_one(&mut self) -> bool {
        if self.artificial_start == self.width {
            return true;
        }
        let mut cost = vec![Rational::zero(); self.width];
        for c in cost.iter_mut().skip(self.artificial_start) {
            *c = Rational::one();
        }
        let optimal = self.optimize(&cost, |_| true);
        debug_assert!(optimal, "phase one is bounded below by zero");
        let residual: Rational = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, &b)| b >= self.artificial_start)
            .map(|(row, _)| row[self.width].clone())
            .sum();
        if residual.is_positive() {
            return false;
        }
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < self.artificial_start {
                r += 1;
                continue;
            }
            match (0..self.artificial_start).find(|&j| !self.rows[r][j].is_zero()) {
                Some(j) => {
                    self.pivot(r, j, None);
                    r += 1;
                }
                None => {
                    // Redundant row.
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
        true
    }

    /// Minimizes `cost · x` over columns accepted by `allowed`, starting from
    /// the current basis. Returns false if the objective is unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: impl Fn(usize) -> bool) -> bool {
        let mut reduced: Vec<Rational> = cost.to_vec();
        reduced.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if !cb.is_zero() {
                for (d, a) in reduced.iter_mut().zip(row) {
                    if !a.is_zero() {
                        *d -= cb * a;
                    }
                }
            }
        }
        loop {
            let Some(entering) = (0..self.width).find(|&j| allowed(j) && reduced[j].is_negative()) else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / a;
                let better = match &leaving {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, _)) = leaving else {
                return false;
            };
            self.pivot(r, entering, Some(&mut reduced));
        }
    }

    fn pivot(&mut self, r: usize, c: usize, reduced: Option<&mut Vec<Rational>>) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a /= &p;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |target: &mut Vec<Rational>| {
            let factor = target[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &nonzero {
                target[j] -= &factor * &pivot_row[j];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        if let Some(reduced) = reduced {
            eliminate(reduced);
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    fn original_point(&self) -> Vec<Rational> {
        let mut values = vec![Rational::zero(); self.width];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            values[b] = row[self.width].clone();
        }
        let n = self.variable_count;
        (0..n).map(|i| if self.nonneg { values[i].clone() } else { &values[i] - &values[n + i] }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_rational, ratio};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn row(coeffs: &[&str], relation: Relation, rhs: &str) -> LinearConstraint {
        LinearConstraint::new(coeffs.iter().map(|c| r(c)).collect(), relation, r(rhs))
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let system =
            LinearSystem::unnormalized(1).with(row(&["1"], Relation::Eq, "1")).with(row(&["1"], Relation::Ge, "2"));
        assert!(!lp_feasible(&system).unwrap());
        assert_eq!(lp_optimize(&system, &[r("1")], Sense::Minimize), Err(Error::Infeasible));
    }

    #[test]
    fn maximize_single_bounded_variable() {
        let system =
            LinearSystem::unnormalized(1).with(row(&["1"], Relation::Le, "1")).with(row(&["1"], Relation::Ge, "0"));
        let sol = lp_optimize(&system, &[r("1")], Sense::Maximize).unwrap();
        assert_eq!(sol.value, ratio(1, 1));
        assert_eq!(sol.point, vec![ratio(1, 1)]);
    }

    #[test]
    fn unbounded_without_normalization() {
        let system = LinearSystem::unnormalized(2).with(row(&["1", "-1"], Relation::Le, "1"));
        assert_eq!(lp_optimize(&system, &[r("1"), r("1")], Sense::Maximize), Err(Error::Unbounded));
        let free = LinearSystem::unnormalized(1).with_nonneg(false);
        assert_eq!(lp_optimize(&free, &[r("1")], Sense::Minimize), Err(Error::Unbounded));
    }

    #[test]
    fn free_variables_can_go_negative() {
        let system = LinearSystem::unnormalized(1)
            .with_nonneg(false)
            .with(row(&["1"], Relation::Ge, "-3/2"))
            .with(row(&["1"], Relation::Le, "4"));
        let sol = lp_optimize(&system, &[r("1")], Sense::Minimize).unwrap();
        assert_eq!(sol.value, ratio(-3, 2));
        assert!(system.is_satisfied_by(&sol.point));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        // Second row duplicates the unit sum.
        let system = LinearSystem::simplex(3).with(row(&["1", "1", "1"], Relation::Eq, "1")).with(row(
            &["1", "1", "0"],
            Relation::Eq,
            "1/2",
        ));
        let sol = lp_optimize(&system, &[r("0"), r("0"), r("1")], Sense::Maximize).unwrap();
        assert_eq!(sol.value, ratio(1, 2));
        assert!(system.is_satisfied_by(&sol.point));
    }

    #[test]
    fn length_mismatch_is_malformed() {
        let system = LinearSystem::simplex(2).with(row(&["1"], Relation::Ge, "0"));
        assert!(matches!(lp_feasible(&system), Err(Error::MalformedSystem(_))));
        let ok = LinearSystem::simplex(2);
        assert!(matches!(lp_optimize(&ok, &[r("1")], Sense::Minimize), Err(Error::MalformedSystem(_))));
    }
}
