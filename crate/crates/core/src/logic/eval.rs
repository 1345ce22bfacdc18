use std::collections::{BTreeMap, BTreeSet};

use super::formula::Formula;
use crate::error::{Error, Result};

pub const DEFAULT_ATOM_CAP: usize = 24;

/// Truth values for atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, atom: impl Into<String>, value: bool) -> &mut Self {
        self.0.insert(atom.into(), value);
        self
    }

    pub fn get(&self, atom: &str) -> Option<bool> {
        self.0.get(atom).copied()
    }
}

impl<S: Into<String>> FromIterator<(S, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, bool)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

pub fn evaluate(f: &Formula, assignment: &Assignment) -> Result<bool> {
    Ok(match f {
        Formula::Atom(name) => assignment.get(name).ok_or_else(|| Error::UnboundAtom(name.clone()))?,
        Formula::Not(inner) => !evaluate(inner, assignment)?,
        Formula::And(a, b) => evaluate(a, assignment)? && evaluate(b, assignment)?,
        Formula::Or(a, b) => evaluate(a, assignment)? || evaluate(b, assignment)?,
        Formula::Implies(a, b) => !evaluate(a, assignment)? || evaluate(b, assignment)?,
    })
}

/// Formula with atoms replaced by bit positions.
enum Compiled {
    Atom(u32),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    fn new(f: &Formula, index: &BTreeMap<&str, u32>) -> Compiled {
        let sub = |g: &Formula| Box::new(Compiled::new(g, index));
        match f {
            Formula::Atom(name) => Compiled::Atom(index[name.as_str()]),
            Formula::Not(g) => Compiled::Not(sub(g)),
            Formula::And(a, b) => Compiled::And(sub(a), sub(b)),
            Formula::Or(a, b) => Compiled::Or(sub(a), sub(b)),
            Formula::Implies(a, b) => Compiled::Implies(sub(a), sub(b)),
        }
    }

    fn eval(&self, bits: u64) -> bool {
        match self {
            Compiled::Atom(i) => bits >> i & 1 == 1,
            Compiled::Not(g) => !g.eval(bits),
            Compiled::And(a, b) => a.eval(bits) && b.eval(bits),
            Compiled::Or(a, b) => a.eval(bits) || b.eval(bits),
            Compiled::Implies(a, b) => !a.eval(bits) || b.eval(bits),
        }
    }
}

/// True iff some assignment over the atoms gives every formula its label.
pub fn consistent(labeled: &[(Formula, bool)]) -> Result<bool> {
    consistent_with_cap(labeled, DEFAULT_ATOM_CAP)
}

pub fn consistent_with_cap(labeled: &[(Formula, bool)], atom_cap: usize) -> Result<bool> {
    let refs: Vec<(&Formula, bool)> = labeled.iter().map(|(f, l)| (f, *l)).collect();
    consistent_refs(&refs, atom_cap)
}

pub(crate) fn consistent_refs(labeled: &[(&Formula, bool)], atom_cap: usize) -> Result<bool> {
    let mut atoms = BTreeSet::new();
    for (f, _) in labeled {
        f.collect_atoms(&mut atoms);
    }
    let cap = atom_cap.min(63);
    if atoms.len() > cap {
        return Err(Error::AtomLimitExceeded { atoms: atoms.len(), cap: atom_cap });
    }
    let index: BTreeMap<&str, u32> = atoms.iter().enumerate().map(|(i, a)| (*a, i as u32)).collect();
    let compiled: Vec<(Compiled, bool)> = labeled.iter().map(|(f, l)| (Compiled::new(f, &index), *l)).collect();
    Ok((0..1u64 << atoms.len()).any(|bits| compiled.iter().all(|(c, l)| c.eval(bits) == *l)))
}
