//! Possible-worlds classes grown as a semantic tree.
//!
//! A leaf is a truth vector over the sentences added so far that at least one
//! atom assignment realizes. Adding a sentence splits each live leaf into a
//! true child and a false child and prunes the unrealizable ones, so leaves
//! stay in depth-first, true-branch-first order. One probability unknown per
//! leaf turns sentence bounds into a linear system.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{lp_optimize, Interval, LinearConstraint, LinearSystem, Rational, Relation, Sense};
use crate::logic::{self, Formula};

pub const DEFAULT_LEAF_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeLayout {
    /// Root splits on the target sentence.
    TargetFirst(Formula),
    /// The first levels are mutually exclusive, exhaustive conditions: each
    /// initial leaf makes exactly one of them true.
    ConditionFirst(Vec<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeMode {
    TargetFirst,
    ConditionFirst(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldClass {
    pub labels: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticTree {
    sentences: Vec<Formula>,
    leaves: Vec<WorldClass>,
    mode: TreeMode,
    leaf_cap: usize,
    atom_cap: usize,
}

fn realizable(sentences: &[Formula], labels: &[bool], atom_cap: usize) -> Result<bool> {
    let labeled: Vec<(&Formula, bool)> = sentences.iter().zip(labels.iter().copied()).collect();
    logic::eval::consistent_refs(&labeled, atom_cap)
}

pub fn tree_init(layout: TreeLayout) -> Result<SemanticTree> {
    SemanticTree::with_caps(layout, DEFAULT_LEAF_CAP, logic::DEFAULT_ATOM_CAP)
}

pub fn tree_add_sentence(tree: &SemanticTree, sentence: Formula) -> Result<SemanticTree> {
    tree.with_sentence(sentence)
}

impl SemanticTree {
    pub fn with_caps(layout: TreeLayout, leaf_cap: usize, atom_cap: usize) -> Result<SemanticTree> {
        let (sentences, candidates, mode) = match layout {
            TreeLayout::TargetFirst(target) => (vec![target], vec![vec![true], vec![false]], TreeMode::TargetFirst),
            TreeLayout::ConditionFirst(conditions) => {
                let n = conditions.len();
                let distinct = conditions.iter().enumerate().all(|(i, c)| !conditions[..i].contains(c));
                if n < 2 || !distinct {
                    return Err(Error::DegenerateConditions);
                }
                let one_hot = (0..n).map(|k| (0..n).map(|j| j == k).collect()).collect();
                (conditions, one_hot, TreeMode::ConditionFirst(n))
            }
        };
        let mut leaves = Vec::new();
        for labels in candidates {
            if realizable(&sentences, &labels, atom_cap)? {
                leaves.push(WorldClass { labels });
            }
        }
        if leaves.len() > leaf_cap {
            return Err(Error::LeafLimitExceeded { cap: leaf_cap });
        }
        Ok(SemanticTree { sentences, leaves, mode, leaf_cap, atom_cap })
    }

    /// Expands every live leaf on `sentence`.
    pub fn with_sentence(&self, sentence: Formula) -> Result<SemanticTree> {
        if self.sentences.contains(&sentence) {
            return Err(Error::DuplicateSentence(sentence.to_string()));
        }
        let mut sentences = self.sentences.clone();
        sentences.push(sentence);
        let mut leaves = Vec::with_capacity(self.leaves.len() * 2);
        for leaf in &self.leaves {
            for value in [true, false] {
                let mut labels = leaf.labels.clone();
                labels.push(value);
                if realizable(&sentences, &labels, self.atom_cap)? {
                    leaves.push(WorldClass { labels });
                    if leaves.len() > self.leaf_cap {
                        return Err(Error::LeafLimitExceeded { cap: self.leaf_cap });
                    }
                }
            }
        }
        Ok(SemanticTree { sentences, leaves, mode: self.mode, leaf_cap: self.leaf_cap, atom_cap: self.atom_cap })
    }

    pub fn sentences(&self) -> &[Formula] {
        &self.sentences
    }

    pub fn leaves(&self) -> &[WorldClass] {
        &self.leaves
    }

    pub fn mode(&self) -> TreeMode {
        self.mode
    }

    pub fn sentence_index(&self, sentence: &Formula) -> Option<usize> {
        self.sentences.iter().position(|s| s == sentence)
    }

    /// Leaves in which sentence `index` is labelled true.
    pub fn true_leaves(&self, index: usize) -> Vec<usize> {
        (0..self.leaves.len()).filter(|&k| self.leaves[k].labels[index]).collect()
    }

    /// Truth of `formula` in a leaf, built from the labels of tree sentences
    /// by exact formula identity and the connectives.
    pub fn leaf_value(&self, leaf: usize, formula: &Formula) -> Option<bool> {
        if let Some(i) = self.sentence_index(formula) {
            return Some(self.leaves[leaf].labels[i]);
        }
        Some(match formula {
            Formula::Atom(_) => return None,
            Formula::Not(f) => !self.leaf_value(leaf, f)?,
            Formula::And(a, b) => self.leaf_value(leaf, a)? && self.leaf_value(leaf, b)?,
            Formula::Or(a, b) => self.leaf_value(leaf, a)? || self.leaf_value(leaf, b)?,
            Formula::Implies(a, b) => !self.leaf_value(leaf, a)? || self.leaf_value(leaf, b)?,
        })
    }

    /// For each condition, the leaves where it holds. Every leaf must satisfy
    /// exactly one condition.
    pub fn condition_map(&self, conditions: &[Formula]) -> Result<Vec<Vec<usize>>> {
        let mut map = vec![Vec::new(); conditions.len()];
        for leaf in 0..self.leaves.len() {
            let mut holding = Vec::new();
            for (j, c) in conditions.iter().enumerate() {
                match self.leaf_value(leaf, c) {
                    Some(true) => holding.push(j),
                    Some(false) => {}
                    None => return Err(Error::ConditionNotInTree(c.to_string())),
                }
            }
            if holding.len() != 1 {
                return Err(Error::ConditionPartition(format!(
                    "world {} satisfies {} conditions",
                    leaf + 1,
                    holding.len()
                )));
            }
            map[holding[0]].push(leaf);
        }
        Ok(map)
    }

    /// 0/1 grid, one row per sentence and one column per leaf.
    pub fn matrix(&self) -> WorldMatrix<'_> {
        WorldMatrix(self)
    }
}

pub struct WorldMatrix<'a>(&'a SemanticTree);

impl WorldMatrix<'_> {
    pub fn rows(&self) -> Vec<Vec<u8>> {
        let tree = self.0;
        (0..tree.sentences.len()).map(|i| tree.leaves.iter().map(|l| u8::from(l.labels[i])).collect()).collect()
    }
}

impl fmt::Display for WorldMatrix<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (row, sentence) in self.rows().iter().zip(&self.0.sentences) {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            writeln!(f, "{}\t({})", cells.join(" "), sentence)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldProbabilitySystem {
    pub tree: SemanticTree,
    pub system: LinearSystem,
}

impl WorldProbabilitySystem {
    /// Coefficient vector summing the leaves where sentence `index` is true.
    pub fn sentence_objective(&self, index: usize) -> Vec<Rational> {
        let mut coefficients = vec![Rational::zero(); self.tree.leaves.len()];
        for k in self.tree.true_leaves(index) {
            coefficients[k] = Rational::one();
        }
        coefficients
    }
}

/// One unknown per leaf; each bounded sentence contributes `Σ p >= lower`
/// and `Σ p <= upper` over its true leaves, vacuous rows omitted.
pub fn build_system(tree: &SemanticTree, bounds: &[(usize, Interval)]) -> Result<WorldProbabilitySystem> {
    let n = tree.leaves.len();
    let mut system = LinearSystem::simplex(n);
    for (index, interval) in bounds {
        if *index >= tree.sentences.len() {
            return Err(Error::IndexOutOfRange { index: *index, len: tree.sentences.len() });
        }
        let true_leaves = tree.true_leaves(*index);
        if !interval.lower().is_zero() {
            system.push(LinearConstraint::sum_of(n, &true_leaves, Relation::Ge, interval.lower().clone()));
        }
        if !interval.upper().is_one() {
            system.push(LinearConstraint::sum_of(n, &true_leaves, Relation::Le, interval.upper().clone()));
        }
    }
    Ok(WorldProbabilitySystem { tree: tree.clone(), system })
}

/// Tightest interval for sentence `target` implied by the bounds.
pub fn entailed_bounds(tree: &SemanticTree, bounds: &[(usize, Interval)], target: usize) -> Result<Interval> {
    if target >= tree.sentences.len() {
        return Err(Error::IndexOutOfRange { index: target, len: tree.sentences.len() });
    }
    let built = build_system(tree, bounds)?;
    let objective = built.sentence_objective(target);
    let low = lp_optimize(&built.system, &objective, Sense::Minimize)?;
    let high = lp_optimize(&built.system, &objective, Sense::Maximize)?;
    Interval::new(low.value, high.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{lp_feasible, parse_rational, ratio};

    fn f(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    fn iv(l: &str, u: &str) -> Interval {
        Interval::new(parse_rational(l).unwrap(), parse_rational(u).unwrap()).unwrap()
    }

    const S3: &str = "(\"B. pressure < 30\" & \"Humidity > 80\") -> Rain";
    const S4: &str = "\"B. pressure < 30\"";
    const S5: &str = "\"Humidity > 80\"";

    #[test]
    fn init_layouts() {
        assert_eq!(tree_init(TreeLayout::TargetFirst(f("Rain"))).unwrap().leaves().len(), 2);
        let three = tree_init(TreeLayout::ConditionFirst(vec![f("c1"), f("c2"), f("c3")])).unwrap();
        assert_eq!(three.leaves().len(), 3);
        assert_eq!(three.mode(), TreeMode::ConditionFirst(3));
        assert_eq!(tree_init(TreeLayout::ConditionFirst(vec![f("c1"), f("c2")])).unwrap().leaves().len(), 2);
        assert_eq!(tree_init(TreeLayout::ConditionFirst(vec![f("c1")])), Err(Error::DegenerateConditions));
        assert_eq!(tree_init(TreeLayout::ConditionFirst(vec![f("c1"), f("c1")])), Err(Error::DegenerateConditions));
    }

    #[test]
    fn beach_tree_grows_five_then_eight() {
        let tree = tree_init(TreeLayout::TargetFirst(f("Rain"))).unwrap();
        let tree = tree_add_sentence(&tree, f(S3)).unwrap();
        let tree = tree_add_sentence(&tree, f(S5)).unwrap();
        assert_eq!(tree.leaves().len(), 5);
        let tree = tree_add_sentence(&tree, f(S4)).unwrap();
        assert_eq!(tree.leaves().len(), 8);
        assert!(matches!(tree_add_sentence(&tree, f(S4)), Err(Error::DuplicateSentence(_))));
    }

    #[test]
    fn first_iteration_system_rows() {
        let tree = tree_init(TreeLayout::TargetFirst(f("Rain"))).unwrap();
        let tree = tree_add_sentence(&tree, f(S3)).unwrap();
        let tree = tree_add_sentence(&tree, f(S5)).unwrap();
        let built = build_system(&tree, &[(1, iv(".65", ".95")), (2, iv(".95", "1"))]).unwrap();
        assert_eq!(built.system.constraints.len(), 3);
        assert_eq!(built.system.all_constraints().len(), 4);
        // Sentence (3) is false only where Rain is false and Humidity is true.
        let s3 = &built.system.constraints[0];
        assert_eq!(s3.coefficients.iter().filter(|c| c.is_one()).count(), 4);
        assert!(lp_feasible(&built.system).unwrap());
    }

    #[test]
    fn no_bounds_is_just_the_simplex() {
        let tree = tree_init(TreeLayout::TargetFirst(f("Rain"))).unwrap();
        let built = build_system(&tree, &[]).unwrap();
        assert!(built.system.constraints.is_empty());
        assert!(built.system.normalized);
    }

    #[test]
    fn condition_first_matrix() {
        let tree = tree_init(TreeLayout::ConditionFirst(vec![f("c1"), f("c2"), f("c3")])).unwrap();
        let tree = tree_add_sentence(&tree, f("B -> c1")).unwrap();
        let tree = tree_add_sentence(&tree, f("B")).unwrap();
        assert_eq!(
            tree.matrix().rows(),
            vec![
                vec![1, 1, 0, 0, 0, 0],
                vec![0, 0, 1, 1, 0, 0],
                vec![0, 0, 0, 0, 1, 1],
                vec![1, 1, 1, 0, 1, 0],
                vec![1, 0, 0, 1, 0, 1],
            ]
        );
        let built = build_system(&tree, &[(3, iv(".9", "1")), (4, iv(".8", "1"))]).unwrap();
        let idx = |c: &LinearConstraint| -> Vec<usize> { (0..6).filter(|&k| c.coefficients[k].is_one()).collect() };
        assert_eq!(idx(&built.system.constraints[0]), vec![0, 1, 2, 4]);
        assert_eq!(idx(&built.system.constraints[1]), vec![0, 3, 5]);
        let c1 = entailed_bounds(&tree, &[(3, iv(".9", "1")), (4, iv(".8", "1"))], 0).unwrap();
        assert_eq!(*c1.lower(), ratio(7, 10));
        assert!(tree.to_owned().matrix().to_string().starts_with("1 1 0 0 0 0\t(c1)"));
    }

    #[test]
    fn modus_ponens_entailment() {
        let tree = tree_init(TreeLayout::TargetFirst(f("Rain"))).unwrap();
        let tree = tree_add_sentence(&tree, f("\"Temperature > 85\"")).unwrap();
        let tree = tree_add_sentence(&tree, f("\"Temperature > 85\" -> Rain")).unwrap();
        assert_eq!(tree.leaves().len(), 4);
        let rain = entailed_bounds(&tree, &[(1, iv(".95", "1")), (2, iv(".4", ".6"))], 0).unwrap();
        assert_eq!(rain, iv("7/20", "3/5"));
        let only = entailed_bounds(&tree, &[(0, iv(".2", ".3"))], 0).unwrap();
        assert_eq!(only, iv(".2", ".3"));
    }

    #[test]
    fn condition_map_by_identity() {
        let tree = tree_init(TreeLayout::TargetFirst(f("Rain"))).unwrap();
        let tree = tree_add_sentence(&tree, f("A")).unwrap();
        assert_eq!(tree.condition_map(&[f("Rain"), f("!Rain")]).unwrap(), vec![vec![0, 1], vec![2, 3]]);
        assert!(matches!(tree.condition_map(&[f("Rain"), f("Snow")]), Err(Error::ConditionNotInTree(_))));
        assert!(matches!(tree.condition_map(&[f("Rain"), f("A")]), Err(Error::ConditionPartition(_))));
    }

    #[test]
    fn leaf_cap() {
        let mut tree = SemanticTree::with_caps(TreeLayout::TargetFirst(f("x0")), 8, 24).unwrap();
        for i in 1..3 {
            tree = tree.with_sentence(f(&format!("x{i}"))).unwrap();
        }
        assert_eq!(tree.with_sentence(f("x3")), Err(Error::LeafLimitExceeded { cap: 8 }));
    }
}
