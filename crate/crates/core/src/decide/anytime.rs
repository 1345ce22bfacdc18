//! Anytime decision loops. Each yields one emission per refinement step and
//! stops early once a single action remains.

use crate::deduction::{DeductionEngine, ProbStatement};
use crate::error::{Error, Result};
use crate::kernel::Interval;
use crate::logic::Formula;
use crate::logic::DEFAULT_ATOM_CAP;
use crate::worlds::{build_system, SemanticTree, TreeLayout, DEFAULT_LEAF_CAP};

use super::{admissible_among, bounds_snapshot_system, AdmissibleSet, CredalDescription, DecisionProblem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emission {
    /// 1-based for deduction steps; 0 is the state before any sentence for
    /// the worlds loop.
    pub step: usize,
    pub admissible: AdmissibleSet,
    /// Current bounds on each condition's probability.
    pub intervals: Vec<Interval>,
}

fn all_actions(problem: &DecisionProblem) -> Vec<usize> {
    (0..problem.actions().len()).collect()
}

/// Deduction-driven loop: one engine with every condition as a target; the
/// admissible set is recomputed over the per-condition interval snapshot
/// after each step.
pub struct FhDecision<'a> {
    problem: &'a DecisionProblem,
    engine: DeductionEngine,
    conditions: Vec<Formula>,
    budget: usize,
    surviving: Vec<usize>,
    done: bool,
}

impl<'a> FhDecision<'a> {
    pub fn new(
        problem: &'a DecisionProblem,
        premises: Vec<ProbStatement>,
        conditions: Vec<Formula>,
        budget: usize,
    ) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidBudget);
        }
        if conditions.len() != problem.conditions().len() {
            return Err(Error::InvalidProblem(format!(
                "{} condition sentences for {} conditions",
                conditions.len(),
                problem.conditions().len()
            )));
        }
        let engine = DeductionEngine::with_targets(premises, conditions.clone());
        Ok(FhDecision { problem, engine, conditions, budget, surviving: all_actions(problem), done: false })
    }

    pub fn engine(&self) -> &DeductionEngine {
        &self.engine
    }

    fn advance(&mut self) -> Result<Option<Emission>> {
        let Some(step) = self.engine.step()? else {
            return Ok(None);
        };
        let intervals: Vec<Interval> = self.conditions.iter().map(|c| self.engine.interval(c)).collect();
        let credal = bounds_snapshot_system(self.problem, &intervals)?;
        let admissible = admissible_among(self.problem, &credal, &self.surviving)?;
        self.surviving = admissible.actions.clone();
        Ok(Some(Emission { step: step.index, admissible, intervals }))
    }
}

impl Iterator for FhDecision<'_> {
    type Item = Result<Emission>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || self.engine.steps_taken() >= self.budget {
            return None;
        }
        let out = self.advance().transpose();
        match &out {
            Some(Ok(e)) if e.admissible.actions.len() > 1 => {}
            _ => self.done = true,
        }
        out
    }
}

pub fn anytime_decide_fh(
    problem: &DecisionProblem,
    premises: Vec<ProbStatement>,
    conditions: Vec<Formula>,
    budget: usize,
) -> Result<Vec<Emission>> {
    FhDecision::new(problem, premises, conditions, budget)?.collect()
}

/// Inputs of the worlds-driven loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilssonSetup {
    pub layout: TreeLayout,
    /// One sentence per decision condition, in problem order.
    pub conditions: Vec<Formula>,
    pub pool: Vec<(Formula, Interval)>,
    /// Pool indices in the order they are added.
    pub order: Vec<usize>,
}

/// Worlds-driven loop: grows the semantic tree one pool sentence at a time and
/// re-tests surviving actions over the leaf unknowns.
pub struct NilssonDecision<'a> {
    problem: &'a DecisionProblem,
    setup: NilssonSetup,
    tree: Option<SemanticTree>,
    leaf_cap: usize,
    bounds: Vec<(usize, Interval)>,
    next: usize,
    surviving: Vec<usize>,
    done: bool,
}

impl<'a> NilssonDecision<'a> {
    pub fn new(problem: &'a DecisionProblem, setup: NilssonSetup) -> Result<Self> {
        if setup.conditions.len() != problem.conditions().len() {
            return Err(Error::InvalidProblem(format!(
                "{} condition sentences for {} conditions",
                setup.conditions.len(),
                problem.conditions().len()
            )));
        }
        let mut seen = vec![false; setup.pool.len()];
        for &i in &setup.order {
            if i >= setup.pool.len() {
                return Err(Error::IndexOutOfRange { index: i, len: setup.pool.len() });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidProblem(format!("pool index {i} repeated in order")));
            }
        }
        Ok(NilssonDecision {
            problem,
            setup,
            tree: None,
            leaf_cap: DEFAULT_LEAF_CAP,
            bounds: Vec::new(),
            next: 0,
            surviving: all_actions(problem),
            done: false,
        })
    }

    pub fn with_leaf_cap(mut self, cap: usize) -> Self {
        self.leaf_cap = cap;
        self
    }

    pub fn tree(&self) -> Option<&SemanticTree> {
        self.tree.as_ref()
    }

    /// Credal description of the current tree and bounds.
    pub fn credal(&self) -> Result<Option<CredalDescription>> {
        let Some(tree) = &self.tree else { return Ok(None) };
        let built = build_system(tree, &self.bounds)?;
        let map = tree.condition_map(&self.setup.conditions)?;
        CredalDescription::new(built.system, map).map(Some)
    }

    fn advance(&mut self) -> Result<Option<Emission>> {
        let step = match self.tree.take() {
            None => {
                self.tree = Some(SemanticTree::with_caps(self.setup.layout.clone(), self.leaf_cap, DEFAULT_ATOM_CAP)?);
                0
            }
            Some(tree) => {
                let Some(&pick) = self.setup.order.get(self.next) else {
                    self.tree = Some(tree);
                    return Ok(None);
                };
                let (sentence, interval) = &self.setup.pool[pick];
                let tree = match tree.sentence_index(sentence) {
                    Some(_) => tree,
                    None => tree.with_sentence(sentence.clone())?,
                };
                let index = tree.sentence_index(sentence).expect("sentence is in the tree");
                self.bounds.push((index, interval.clone()));
                self.tree = Some(tree);
                self.next += 1;
                self.next
            }
        };
        let credal = self.credal()?.expect("tree initialized");
        let admissible = admissible_among(self.problem, &credal, &self.surviving)?;
        let intervals = credal.condition_bounds()?;
        self.surviving = admissible.actions.clone();
        Ok(Some(Emission { step, admissible, intervals }))
    }
}

impl Iterator for NilssonDecision<'_> {
    type Item = Result<Emission>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.advance().transpose();
        match &out {
            Some(Ok(e)) if e.admissible.actions.len() > 1 => {}
            _ => self.done = true,
        }
        out
    }
}

pub fn anytime_decide_nilsson(problem: &DecisionProblem, setup: NilssonSetup) -> Result<Vec<Emission>> {
    NilssonDecision::new(problem, setup)?.collect()
}
