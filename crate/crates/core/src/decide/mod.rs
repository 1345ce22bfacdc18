//! Decision problems, action domains and E-admissibility.
//!
//! An action is E-admissible when its domain (the distributions under which
//! it maximizes expected utility against every rival) meets the credal set.
//! Domains use weak inequalities, so an action tied for best at a single
//! credal point is admissible.

mod anytime;

use std::collections::HashSet;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use anytime::{anytime_decide_fh, anytime_decide_nilsson, Emission, FhDecision, NilssonDecision, NilssonSetup};

use crate::deduction::ProbStatement;
use crate::error::{Error, Result};
use crate::kernel::{lp_feasible, lp_optimize, Interval, LinearConstraint, LinearSystem, Rational, Relation, Sense};
use crate::logic::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionProblem {
    actions: Vec<String>,
    conditions: Vec<String>,
    utility: Vec<Vec<Rational>>,
}

impl DecisionProblem {
    pub fn new(actions: Vec<String>, conditions: Vec<String>, utility: Vec<Vec<Rational>>) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidProblem(m));
        if actions.len() < 2 {
            return invalid("at least two actions are required".into());
        }
        if conditions.len() < 2 {
            return invalid("at least two conditions are required".into());
        }
        for (kind, names) in [("action", &actions), ("condition", &conditions)] {
            let mut seen = HashSet::new();
            if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
                return invalid(format!("duplicate {kind} name {dup:?}"));
            }
        }
        if utility.len() != actions.len() || utility.iter().any(|row| row.len() != conditions.len()) {
            return invalid(format!("utility matrix must be {} x {}", actions.len(), conditions.len()));
        }
        Ok(DecisionProblem { actions, conditions, utility })
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn conditions(&self) -> &[String] {
        &self.conditions
    }

    pub fn utility(&self, action: usize, condition: usize) -> &Rational {
        &self.utility[action][condition]
    }

    pub fn utility_rows(&self) -> &[Vec<Rational>] {
        &self.utility
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    pub fn expected_utility(&self, action: usize, probabilities: &[Rational]) -> Rational {
        self.utility[action].iter().zip(probabilities).map(|(u, p)| u * p).sum()
    }
}

/// A credal set together with, for each condition, the unknowns whose sum is
/// that condition's probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CredalDescription {
    pub system: LinearSystem,
    pub condition_map: Vec<Vec<usize>>,
}

impl CredalDescription {
    pub fn new(system: LinearSystem, condition_map: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = HashSet::new();
        for &v in condition_map.iter().flatten() {
            if v >= system.variable_count {
                return Err(Error::IndexOutOfRange { index: v, len: system.variable_count });
            }
            if !seen.insert(v) {
                return Err(Error::ConditionPartition(format!("variable {v} belongs to two conditions")));
            }
        }
        Ok(CredalDescription { system, condition_map })
    }

    pub fn condition_objective(&self, condition: usize) -> Vec<Rational> {
        let mut coefficients = vec![Rational::zero(); self.system.variable_count];
        for &v in &self.condition_map[condition] {
            coefficients[v] = Rational::one();
        }
        coefficients
    }

    pub fn is_feasible(&self) -> Result<bool> {
        lp_feasible(&self.system)
    }

    /// Tightest interval on each condition's probability over the credal set.
    pub fn condition_bounds(&self) -> Result<Vec<Interval>> {
        (0..self.condition_map.len())
            .map(|j| {
                let objective = self.condition_objective(j);
                let low = lp_optimize(&self.system, &objective, Sense::Minimize).map_err(infeasible_credal)?;
                let high = lp_optimize(&self.system, &objective, Sense::Maximize).map_err(infeasible_credal)?;
                Interval::new(low.value, high.value)
            })
            .collect()
    }
}

fn infeasible_credal(e: Error) -> Error {
    match e {
        Error::Infeasible => Error::InfeasibleCredal,
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleSet {
    /// Action indices in problem order.
    pub actions: Vec<usize>,
    pub provenance: String,
}

impl AdmissibleSet {
    pub fn names<'a>(&self, problem: &'a DecisionProblem) -> Vec<&'a str> {
        self.actions.iter().map(|&i| problem.actions[i].as_str()).collect()
    }

    pub fn contains(&self, action: usize) -> bool {
        self.actions.contains(&action)
    }

    pub fn is_subset_of(&self, other: &AdmissibleSet) -> bool {
        self.actions.iter().all(|a| other.actions.contains(a))
    }
}

fn check_map(problem: &DecisionProblem, credal: &CredalDescription) -> Result<()> {
    if credal.condition_map.len() != problem.conditions.len() {
        return Err(Error::InvalidProblem(format!(
            "credal description maps {} conditions, problem has {}",
            credal.condition_map.len(),
            problem.conditions.len()
        )));
    }
    Ok(())
}

/// Rows `Σ_j p(c_j) (U(a_i, c_j) − U(a_k, c_j)) >= 0`, one per rival `k`,
/// with each `p(c_j)` expanded to its unknowns.
pub fn domain_inequalities(
    problem: &DecisionProblem,
    action: usize,
    credal: &CredalDescription,
) -> Vec<LinearConstraint> {
    let n = credal.system.variable_count;
    (0..problem.actions.len())
        .filter(|&k| k != action)
        .map(|k| {
            let mut coefficients = vec![Rational::zero(); n];
            for (j, vars) in credal.condition_map.iter().enumerate() {
                let gap = &problem.utility[action][j] - &problem.utility[k][j];
                for &v in vars {
                    coefficients[v] += &gap;
                }
            }
            LinearConstraint::new(coefficients, Relation::Ge, Rational::zero())
        })
        .collect()
}

pub fn e_admissible(problem: &DecisionProblem, action: usize, credal: &CredalDescription) -> Result<bool> {
    check_map(problem, credal)?;
    if !credal.is_feasible()? {
        return Err(Error::InfeasibleCredal);
    }
    action_feasible(problem, action, credal)
}

fn action_feasible(problem: &DecisionProblem, action: usize, credal: &CredalDescription) -> Result<bool> {
    if action >= problem.actions.len() {
        return Err(Error::IndexOutOfRange { index: action, len: problem.actions.len() });
    }
    lp_feasible(&credal.system.extended(domain_inequalities(problem, action, credal)))
}

pub fn admissible_set(problem: &DecisionProblem, credal: &CredalDescription) -> Result<AdmissibleSet> {
    let all: Vec<usize> = (0..problem.actions.len()).collect();
    admissible_among(problem, credal, &all)
}

/// Admissible members of `candidates`. Domains are still measured against
/// every action of the problem.
pub fn admissible_among(
    problem: &DecisionProblem,
    credal: &CredalDescription,
    candidates: &[usize],
) -> Result<AdmissibleSet> {
    check_map(problem, credal)?;
    if !credal.is_feasible()? {
        return Err(Error::InfeasibleCredal);
    }
    let verdicts: Vec<bool> =
        candidates.par_iter().map(|&a| action_feasible(problem, a, credal)).collect::<Result<_>>()?;
    let actions: Vec<usize> = candidates.iter().zip(verdicts).filter(|(_, ok)| *ok).map(|(&a, _)| a).collect();
    Ok(AdmissibleSet {
        actions,
        provenance: format!(
            "{} unknowns, {} constraints",
            credal.system.variable_count,
            credal.system.all_constraints().len()
        ),
    })
}

/// `p(c_1 ∨ … ∨ c_n) ∈ [1, 1]` followed by `p(c_i & c_j) ∈ [0, 0]` for i < j.
pub fn exclusivity_statements(conditions: &[Formula]) -> Result<Vec<ProbStatement>> {
    if conditions.len() < 2 {
        return Err(Error::DegenerateConditions);
    }
    let certain = Interval::point(Rational::one())?;
    let impossible = Interval::point(Rational::zero())?;
    let any = conditions.iter().cloned().reduce(Formula::or).expect("two or more conditions");
    let mut out = vec![ProbStatement::premise(any, certain)];
    for i in 0..conditions.len() {
        for j in i + 1..conditions.len() {
            let both = Formula::and(conditions[i].clone(), conditions[j].clone());
            out.push(ProbStatement::premise(both, impossible.clone()));
        }
    }
    Ok(out)
}

/// One unknown per condition, bounded by its current interval.
pub fn bounds_snapshot_system(problem: &DecisionProblem, intervals: &[Interval]) -> Result<CredalDescription> {
    let n = problem.conditions.len();
    if intervals.len() != n {
        return Err(Error::InvalidProblem(format!("{} intervals for {n} conditions", intervals.len())));
    }
    let mut system = LinearSystem::simplex(n);
    for (j, interval) in intervals.iter().enumerate() {
        if !interval.lower().is_zero() {
            system.push(LinearConstraint::sum_of(n, &[j], Relation::Ge, interval.lower().clone()));
        }
        if !interval.upper().is_one() {
            system.push(LinearConstraint::sum_of(n, &[j], Relation::Le, interval.upper().clone()));
        }
    }
    CredalDescription::new(system, (0..n).map(|j| vec![j]).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fallback {
    /// Seeded uniform pick.
    Random { seed: u64 },
    /// Best worst-case utility.
    Maximin,
    /// Expected utility at the interval midpoints, renormalized to sum to 1.
    Midpoint(Vec<Interval>),
}

/// Picks one admissible action by a non-probabilistic criterion. Ties go to
/// the earliest action.
pub fn fallback_choose(problem: &DecisionProblem, admissible: &AdmissibleSet, criterion: &Fallback) -> Result<usize> {
    if admissible.actions.is_empty() {
        return Err(Error::EmptyAdmissible);
    }
    let best_by = |score: &dyn Fn(usize) -> Rational| -> usize {
        let mut best = admissible.actions[0];
        let mut best_score = score(best);
        for &a in &admissible.actions[1..] {
            let s = score(a);
            if s > best_score {
                best = a;
                best_score = s;
            }
        }
        best
    };
    match criterion {
        Fallback::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Ok(admissible.actions[rng.random_range(0..admissible.actions.len())])
        }
        Fallback::Maximin => Ok(best_by(&|a| problem.utility[a].iter().min().cloned().expect("n >= 2"))),
        Fallback::Midpoint(intervals) => {
            if intervals.len() != problem.conditions.len() {
                return Err(Error::InvalidProblem(format!(
                    "{} intervals for {} conditions",
                    intervals.len(),
                    problem.conditions.len()
                )));
            }
            let mids: Vec<Rational> = intervals.iter().map(Interval::midpoint).collect();
            let total: Rational = mids.iter().sum();
            let probabilities: Vec<Rational> = if total.is_zero() {
                let n = Rational::from_integer((mids.len() as i64).into());
                vec![Rational::one() / n; mids.len()]
            } else {
                mids.iter().map(|m| m / &total).collect()
            };
            Ok(best_by(&|a| problem.expected_utility(a, &probabilities)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_rational, ratio};

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn iv(l: &str, u: &str) -> Interval {
        Interval::new(r(l), r(u)).unwrap()
    }

    fn beach() -> DecisionProblem {
        DecisionProblem::new(
            vec!["Go".into(), "Do not go".into()],
            vec!["Rain".into(), "No rain".into()],
            vec![vec![r("0"), r("1")], vec![r(".8"), r(".2")]],
        )
        .unwrap()
    }

    #[test]
    fn problem_validation() {
        let bad = DecisionProblem::new(vec!["a".into()], vec!["x".into(), "y".into()], vec![vec![r("1"), r("1")]]);
        assert!(matches!(bad, Err(Error::InvalidProblem(_))));
        let dup = DecisionProblem::new(
            vec!["a".into(), "a".into()],
            vec!["x".into(), "y".into()],
            vec![vec![r("1"), r("1")], vec![r("1"), r("1")]],
        );
        assert!(matches!(dup, Err(Error::InvalidProblem(_))));
        let ragged = DecisionProblem::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![vec![r("1"), r("1")], vec![r("1")]],
        );
        assert!(matches!(ragged, Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn do_not_go_domain_is_rain_at_least_half() {
        let problem = beach();
        let credal = bounds_snapshot_system(&problem, &[Interval::unit(), Interval::unit()]).unwrap();
        let rows = domain_inequalities(&problem, 1, &credal);
        assert_eq!(rows.len(), 1);
        // .8 p(Rain) - .8 p(No rain) >= 0, i.e. p(Rain) >= 1/2 on the simplex.
        assert_eq!(rows[0].coefficients, vec![r(".8"), r("-.8")]);
        assert_eq!(rows[0].relation, Relation::Ge);
    }

    #[test]
    fn constant_utilities_give_trivial_rows() {
        let problem = DecisionProblem::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![vec![r("1"), r("1")], vec![r("1"), r("1")]],
        )
        .unwrap();
        let credal = bounds_snapshot_system(&problem, &[Interval::unit(), Interval::unit()]).unwrap();
        for row in domain_inequalities(&problem, 0, &credal) {
            assert!(row.coefficients.iter().all(Zero::is_zero));
        }
        assert_eq!(admissible_set(&problem, &credal).unwrap().actions, vec![0, 1]);
    }

    #[test]
    fn narrowed_rain_interval_eliminates_go() {
        let problem = beach();
        let credal = bounds_snapshot_system(&problem, &[iv(".55", ".95"), Interval::unit()]).unwrap();
        assert!(!e_admissible(&problem, 0, &credal).unwrap());
        assert!(e_admissible(&problem, 1, &credal).unwrap());
        assert_eq!(admissible_set(&problem, &credal).unwrap().actions, vec![1]);
        let simplex = bounds_snapshot_system(&problem, &[Interval::unit(), Interval::unit()]).unwrap();
        assert_eq!(admissible_set(&problem, &simplex).unwrap().actions, vec![0, 1]);
    }

    #[test]
    fn boundary_tie_admits_both() {
        let problem = beach();
        let credal = bounds_snapshot_system(&problem, &[iv(".5", ".5"), Interval::unit()]).unwrap();
        assert_eq!(admissible_set(&problem, &credal).unwrap().actions, vec![0, 1]);
    }

    #[test]
    fn infeasible_snapshot() {
        let problem = beach();
        let credal = bounds_snapshot_system(&problem, &[iv(".7", "1"), iv(".7", "1")]).unwrap();
        assert_eq!(admissible_set(&problem, &credal), Err(Error::InfeasibleCredal));
        assert_eq!(e_admissible(&problem, 0, &credal), Err(Error::InfeasibleCredal));
    }

    #[test]
    fn exclusivity_counts() {
        for (n, expected) in [(2, 2), (3, 4), (4, 7)] {
            let conds: Vec<Formula> = (1..=n).map(|i| Formula::atom(format!("c{i}"))).collect();
            let out = exclusivity_statements(&conds).unwrap();
            assert_eq!(out.len(), expected);
            assert_eq!(out[0].bounds, iv("1", "1"));
            assert!(out[1..].iter().all(|s| s.bounds == iv("0", "0")));
        }
        assert_eq!(exclusivity_statements(&[Formula::atom("c")]), Err(Error::DegenerateConditions));
    }

    #[test]
    fn fallbacks() {
        let problem = beach();
        let both = AdmissibleSet { actions: vec![0, 1], provenance: String::new() };
        assert_eq!(fallback_choose(&problem, &both, &Fallback::Maximin).unwrap(), 1);
        let mid = Fallback::Midpoint(vec![iv(".55", ".6"), iv(".4", ".45")]);
        assert_eq!(fallback_choose(&problem, &both, &mid).unwrap(), 1);
        let eu = problem.expected_utility(1, &[r(".575"), r(".425")]);
        assert_eq!(eu, r(".545"));
        assert_eq!(problem.expected_utility(0, &[r(".575"), r(".425")]), r(".425"));
        let pick = fallback_choose(&problem, &both, &Fallback::Random { seed: 9 }).unwrap();
        for _ in 0..5 {
            assert_eq!(fallback_choose(&problem, &both, &Fallback::Random { seed: 9 }).unwrap(), pick);
        }
        let empty = AdmissibleSet { actions: vec![], provenance: String::new() };
        assert_eq!(fallback_choose(&problem, &empty, &Fallback::Maximin), Err(Error::EmptyAdmissible));
    }

    #[test]
    fn interior_point_picks_unique_best() {
        let problem = DecisionProblem::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![r("1"), r("0"), r("0")], vec![r("0"), r("1"), r("0")], vec![r("0"), r("0"), r("1")]],
        )
        .unwrap();
        let point = [ratio(1, 5), ratio(1, 2), ratio(3, 10)];
        let intervals: Vec<Interval> = point.iter().map(|p| Interval::point(p.clone()).unwrap()).collect();
        let credal = bounds_snapshot_system(&problem, &intervals).unwrap();
        assert_eq!(admissible_set(&problem, &credal).unwrap().actions, vec![1]);
    }
}
