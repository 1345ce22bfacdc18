//! Interval-labelled statements, four sound inference rules, and a stepwise
//! engine that narrows the interval of a target sentence one rule
//! application at a time.

mod engine;
mod rules;

use std::fmt;

use serde::Serialize;

pub use engine::{anytime_deduce, DeductionEngine};
pub use rules::{rule_conjunction, rule_forward_implication, rule_multiple, rule_trivial};

use crate::kernel::Interval;
use crate::logic::Formula;

/// Index of a statement in the engine's statement list. Premises keep their
/// position in the knowledge base; derived statements follow.
pub type StatementId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    TrivialDerivation,
    ForwardImplication,
    ConjunctionIntroduction,
    MultipleDerivation,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::TrivialDerivation => "trivial-derivation",
            Rule::ForwardImplication => "forward-implication",
            Rule::ConjunctionIntroduction => "conjunction-introduction",
            Rule::MultipleDerivation => "multiple-derivation",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Premise,
    Derived { rule: Rule, parents: Vec<StatementId> },
}

/// `p(sentence) ∈ bounds`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbStatement {
    pub sentence: Formula,
    pub bounds: Interval,
    pub origin: Origin,
}

impl ProbStatement {
    pub fn premise(sentence: Formula, bounds: Interval) -> Self {
        ProbStatement { sentence, bounds, origin: Origin::Premise }
    }

    pub(crate) fn derived(sentence: Formula, bounds: Interval, rule: Rule) -> Self {
        ProbStatement { sentence, bounds, origin: Origin::Derived { rule, parents: Vec::new() } }
    }

    pub(crate) fn with_parents(mut self, ids: Vec<StatementId>) -> Self {
        if let Origin::Derived { parents, .. } = &mut self.origin {
            *parents = ids;
        }
        self
    }
}

impl fmt::Display for ProbStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({}) in {}", self.sentence, self.bounds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub statements: Vec<ProbStatement>,
    pub target: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// 1-based.
    pub index: usize,
    pub rule: Rule,
    pub inputs: Vec<StatementId>,
    pub produced_id: StatementId,
    pub produced: ProbStatement,
    /// Current interval of every engine target after this step.
    pub targets: Vec<Interval>,
}

impl TraceStep {
    /// Interval of the first (for a knowledge base, the only) target.
    pub fn target(&self) -> &Interval {
        &self.targets[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeductionTrace {
    pub steps: Vec<TraceStep>,
    /// Premises followed by every derived statement, indexed by `StatementId`.
    pub statements: Vec<ProbStatement>,
}

impl DeductionTrace {
    pub fn target_intervals(&self) -> Vec<&Interval> {
        self.steps.iter().map(TraceStep::target).collect()
    }

    pub fn final_interval(&self) -> Option<&Interval> {
        self.steps.last().map(TraceStep::target)
    }

    pub fn derived(&self) -> impl Iterator<Item = &ProbStatement> {
        self.steps.iter().map(|s| &s.produced)
    }
}
