//! Agenda-driven rule application.
//!
//! Every sentence has at most one designated statement, the tightest one the
//! engine has established for it. Steps are chosen in this order:
//!
//! 1. trivial derivation of each target, once, before anything else;
//! 2. pending multiple derivations: whenever a statement arrives for a
//!    sentence that already had one, the two are intersected next;
//! 3. forward implication and conjunction instances over designated
//!    statements, ranked by how many implication links separate their
//!    conclusion from a target (targets first, then antecedents of
//!    implications into a target, ...), then by statement order.
//!
//! Instances whose conclusion could not narrow the current interval of that
//! sentence are discarded, and no instance is ever applied twice to the same
//! inputs. The engine stops when the agenda is empty.

use std::collections::{HashMap, HashSet, VecDeque};

use super::rules::{rule_conjunction, rule_forward_implication, rule_multiple, rule_trivial};
use super::{DeductionTrace, KnowledgeBase, ProbStatement, Rule, StatementId, TraceStep};
use crate::error::{Error, Result};
use crate::kernel::Interval;
use crate::logic::Formula;

type Instance = (Rule, Vec<StatementId>);

pub struct DeductionEngine {
    statements: Vec<ProbStatement>,
    targets: Vec<Formula>,
    /// Implication distance from a target, for every sentence worth deriving.
    depth: HashMap<Formula, usize>,
    designated: HashMap<Formula, StatementId>,
    /// Premises on a target wait for that target's trivial derivation.
    waiting: Vec<StatementId>,
    /// (previously designated, newcomer) pairs awaiting intersection.
    followups: VecDeque<(StatementId, StatementId)>,
    applied: HashSet<Instance>,
    discarded: HashSet<Instance>,
    next_trivial: usize,
    steps_taken: usize,
}

impl DeductionEngine {
    pub fn new(kb: &KnowledgeBase) -> Self {
        Self::with_targets(kb.statements.clone(), vec![kb.target.clone()])
    }

    /// An engine maintaining intervals for several targets at once.
    pub fn with_targets(premises: Vec<ProbStatement>, targets: Vec<Formula>) -> Self {
        let mut unique_targets: Vec<Formula> = Vec::new();
        for t in targets {
            if !unique_targets.contains(&t) {
                unique_targets.push(t);
            }
        }
        let depth = relevance_depths(&premises, &unique_targets);
        let mut engine = DeductionEngine {
            statements: premises,
            targets: unique_targets,
            depth,
            designated: HashMap::new(),
            waiting: Vec::new(),
            followups: VecDeque::new(),
            applied: HashSet::new(),
            discarded: HashSet::new(),
            next_trivial: 0,
            steps_taken: 0,
        };
        for id in 0..engine.statements.len() {
            if engine.targets.contains(&engine.statements[id].sentence) {
                engine.waiting.push(id);
            } else {
                engine.register(id);
            }
        }
        engine
    }

    pub fn targets(&self) -> &[Formula] {
        &self.targets
    }

    pub fn statements(&self) -> &[ProbStatement] {
        &self.statements
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Interval of the designated statement for `sentence`, `[0, 1]` if none.
    pub fn interval(&self, sentence: &Formula) -> Interval {
        self.designated.get(sentence).map_or_else(Interval::unit, |&id| self.statements[id].bounds.clone())
    }

    pub fn target_intervals(&self) -> Vec<Interval> {
        self.targets.iter().map(|t| self.interval(t)).collect()
    }

    /// Applies one rule instance. `Ok(None)` once the agenda is empty.
    pub fn step(&mut self) -> Result<Option<TraceStep>> {
        if self.next_trivial < self.targets.len() {
            let target = self.targets[self.next_trivial].clone();
            self.next_trivial += 1;
            let id = self.push(rule_trivial(target.clone()), Vec::new());
            self.designated.insert(target.clone(), id);
            let (ready, still_waiting): (Vec<_>, Vec<_>) =
                self.waiting.iter().partition(|&&w| self.statements[w].sentence == target);
            self.waiting = still_waiting;
            for w in ready {
                self.register(w);
            }
            return Ok(Some(self.record(Rule::TrivialDerivation, Vec::new(), id)));
        }

        while let Some((previous, newcomer)) = self.followups.pop_front() {
            let sentence = self.statements[newcomer].sentence.clone();
            let current = self.designated[&sentence];
            let partner = if current != newcomer { current } else { previous };
            let inputs = vec![partner, newcomer];
            if !self.applied.insert((Rule::MultipleDerivation, inputs.clone())) {
                continue;
            }
            let merged = rule_multiple(&self.statements[partner], &self.statements[newcomer])?;
            let narrows = {
                let cur = &self.statements[current].bounds;
                merged.bounds.is_subset_of(cur) && merged.bounds != *cur
            };
            let id = self.push(merged, inputs.clone());
            if narrows {
                self.designated.insert(sentence, id);
            }
            return Ok(Some(self.record(Rule::MultipleDerivation, inputs, id)));
        }

        let Some((rule, inputs, produced)) = self.best_instance()? else {
            return Ok(None);
        };
        self.applied.insert((rule, inputs.clone()));
        let id = self.push(produced, inputs.clone());
        self.register(id);
        Ok(Some(self.record(rule, inputs, id)))
    }

    fn push(&mut self, statement: ProbStatement, parents: Vec<StatementId>) -> StatementId {
        self.statements.push(statement.with_parents(parents));
        self.statements.len() - 1
    }

    fn record(&mut self, rule: Rule, inputs: Vec<StatementId>, id: StatementId) -> TraceStep {
        self.steps_taken += 1;
        TraceStep {
            index: self.steps_taken,
            rule,
            inputs,
            produced_id: id,
            produced: self.statements[id].clone(),
            targets: self.target_intervals(),
        }
    }

    fn register(&mut self, id: StatementId) {
        let sentence = self.statements[id].sentence.clone();
        match self.designated.get(&sentence).copied() {
            None => {
                self.designated.insert(sentence, id);
            }
            Some(current) => {
                if self.statements[id].bounds.is_subset_of(&self.statements[current].bounds) {
                    self.designated.insert(sentence, id);
                }
                self.followups.push_back((current, id));
            }
        }
    }

    /// Highest-ranked applicable instance. Useless instances found along the
    /// way are discarded for good: designated intervals only ever shrink.
    fn best_instance(&mut self) -> Result<Option<(Rule, Vec<StatementId>, ProbStatement)>> {
        let mut candidates: Vec<Instance> = Vec::new();
        let mut designated: Vec<(&Formula, StatementId)> = self.designated.iter().map(|(f, &id)| (f, id)).collect();
        designated.sort_by_key(|&(_, id)| id);
        for &(sentence, id) in &designated {
            if let Formula::Implies(antecedent, consequent) = sentence {
                if self.depth.contains_key(&**consequent) {
                    if let Some(&a) = self.designated.get(&**antecedent) {
                        candidates.push((Rule::ForwardImplication, vec![a, id]));
                    }
                }
            }
        }
        for wanted in self.depth.keys() {
            if let Formula::And(left, right) = wanted {
                if let (Some(&a), Some(&b)) = (self.designated.get(&**left), self.designated.get(&**right)) {
                    candidates.push((Rule::ConjunctionIntroduction, vec![a, b]));
                }
            }
        }

        let mut best: Option<((usize, Vec<StatementId>), Instance, ProbStatement)> = None;
        for instance in candidates {
            if self.applied.contains(&instance) || self.discarded.contains(&instance) {
                continue;
            }
            let (rule, inputs) = &instance;
            let produced = match rule {
                Rule::ForwardImplication => {
                    rule_forward_implication(&self.statements[inputs[0]], &self.statements[inputs[1]])?
                }
                Rule::ConjunctionIntroduction => {
                    rule_conjunction(&self.statements[inputs[0]], &self.statements[inputs[1]])
                }
                _ => unreachable!("only forward implication and conjunction are ranked"),
            };
            if self.interval(&produced.sentence).is_subset_of(&produced.bounds) {
                self.discarded.insert(instance);
                continue;
            }
            let mut order = inputs.clone();
            order.sort_unstable();
            let key = (self.depth[&produced.sentence], order);
            if best.as_ref().is_none_or(|(k, _, _)| key < *k) {
                best = Some((key, instance, produced));
            }
        }
        Ok(best.map(|(_, (rule, inputs), produced)| (rule, inputs, produced)))
    }
}

/// Sentences that can contribute to a target, keyed by implication distance.
/// Targets sit at 0; an implication `β → α` into a sentence at depth d puts
/// both `β` and the implication itself at d + 1; a conjunction at depth d
/// puts its conjuncts at d + 1.
fn relevance_depths(premises: &[ProbStatement], targets: &[Formula]) -> HashMap<Formula, usize> {
    let mut universe: Vec<Formula> = Vec::new();
    for f in premises.iter().map(|s| &s.sentence).chain(targets) {
        for sub in f.subformulas() {
            if !universe.contains(sub) {
                universe.push(sub.clone());
            }
        }
    }
    let mut depth: HashMap<Formula, usize> = targets.iter().map(|t| (t.clone(), 0)).collect();
    let relax = |f: &Formula, d: usize, depth: &mut HashMap<Formula, usize>| -> bool {
        if depth.get(f).is_none_or(|&old| d < old) {
            depth.insert(f.clone(), d);
            return true;
        }
        false
    };
    let mut changed = true;
    while changed {
        changed = false;
        for f in &universe {
            match f {
                Formula::Implies(antecedent, consequent) => {
                    if let Some(&d) = depth.get(&**consequent) {
                        changed |= relax(antecedent, d + 1, &mut depth);
                        changed |= relax(f, d + 1, &mut depth);
                    }
                }
                Formula::And(left, right) => {
                    if let Some(&d) = depth.get(f) {
                        changed |= relax(left, d + 1, &mut depth);
                        changed |= relax(right, d + 1, &mut depth);
                    }
                }
                _ => {}
            }
        }
    }
    depth
}

/// Runs at most `budget` steps on the knowledge base's target.
pub fn anytime_deduce(kb: &KnowledgeBase, budget: usize) -> Result<DeductionTrace> {
    if budget == 0 {
        return Err(Error::InvalidBudget);
    }
    let mut engine = DeductionEngine::new(kb);
    let mut steps = Vec::new();
    while steps.len() < budget {
        match engine.step()? {
            Some(step) => steps.push(step),
            None => break,
        }
    }
    Ok(DeductionTrace { steps, statements: engine.statements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_rational;

    fn st(sentence: &str, l: &str, u: &str) -> ProbStatement {
        let bounds = Interval::new(parse_rational(l).unwrap(), parse_rational(u).unwrap()).unwrap();
        ProbStatement::premise(Formula::parse(sentence).unwrap(), bounds)
    }

    fn iv(l: &str, u: &str) -> Interval {
        Interval::new(parse_rational(l).unwrap(), parse_rational(u).unwrap()).unwrap()
    }

    fn beach() -> KnowledgeBase {
        KnowledgeBase {
            statements: vec![
                st("\"Temperature > 85\"", ".95", "1"),
                st("\"Temperature > 85\" -> Rain", ".4", ".6"),
                st("(\"B. pressure < 30\" & \"Humidity > 80\") -> Rain", ".65", ".95"),
                st("\"B. pressure < 30\"", ".95", "1"),
                st("\"Humidity > 80\"", ".95", "1"),
                st("August -> Rain", ".2", "1"),
                st("August", "1", "1"),
            ],
            target: Formula::atom("Rain"),
        }
    }

    #[test]
    fn beach_derivation_order() {
        let trace = anytime_deduce(&beach(), 20).unwrap();
        let rules: Vec<Rule> = trace.steps.iter().map(|s| s.rule).collect();
        assert_eq!(
            rules,
            vec![
                Rule::TrivialDerivation,
                Rule::ForwardImplication,
                Rule::MultipleDerivation,
                Rule::ConjunctionIntroduction,
                Rule::ForwardImplication,
                Rule::MultipleDerivation,
            ]
        );
        assert_eq!(trace.steps[1].inputs, vec![0, 1]);
        assert_eq!(trace.steps[1].produced.bounds, iv(".35", ".6"));
        assert_eq!(trace.steps[3].inputs, vec![3, 4]);
        assert_eq!(trace.steps[3].produced.bounds, iv(".9", "1"));
        assert_eq!(trace.steps[4].produced.bounds, iv(".55", ".95"));
        assert_eq!(trace.steps[5].produced.bounds, iv(".55", ".6"));
        let targets: Vec<Interval> = trace.target_intervals().into_iter().cloned().collect();
        assert_eq!(
            targets,
            vec![iv("0", "1"), iv(".35", ".6"), iv(".35", ".6"), iv(".35", ".6"), iv(".35", ".6"), iv(".55", ".6"),]
        );
    }

    #[test]
    fn unrelated_kb_stays_vacuous() {
        let kb = KnowledgeBase {
            statements: vec![st("A", ".5", ".6"), st("A -> B", ".9", "1")],
            target: Formula::atom("Rain"),
        };
        let trace = anytime_deduce(&kb, 5).unwrap();
        assert!(trace.target_intervals().iter().all(|i| i.is_unit()));
    }

    #[test]
    fn premise_on_target_merges_on_second_step() {
        let kb = KnowledgeBase { statements: vec![st("Rain", ".2", ".3")], target: Formula::atom("Rain") };
        let trace = anytime_deduce(&kb, 5).unwrap();
        assert_eq!(trace.steps.len(), 2);
        assert_eq!(trace.steps[0].rule, Rule::TrivialDerivation);
        assert_eq!(trace.steps[1].rule, Rule::MultipleDerivation);
        assert_eq!(*trace.steps[1].target(), iv(".2", ".3"));
    }

    #[test]
    fn contradictory_premises_surface() {
        let kb =
            KnowledgeBase { statements: vec![st("A", ".1", ".2"), st("A", ".3", ".4")], target: Formula::atom("A") };
        assert!(matches!(anytime_deduce(&kb, 10), Err(Error::InconsistentPremises { .. })));
    }

    #[test]
    fn zero_budget_is_rejected() {
        assert_eq!(anytime_deduce(&beach(), 0), Err(Error::InvalidBudget));
    }

    #[test]
    fn chains_through_intermediate_sentences() {
        let kb = KnowledgeBase {
            statements: vec![st("A", ".9", "1"), st("A -> B", ".9", "1"), st("B -> C", ".9", "1")],
            target: Formula::atom("C"),
        };
        let trace = anytime_deduce(&kb, 10).unwrap();
        assert_eq!(*trace.final_interval().unwrap(), iv(".7", "1"));
    }
}
