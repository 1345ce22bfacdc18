//! Oracles and random instance generators shared by the integration tests.
//! The oracles avoid the crate's own solvers wherever that is practical.
#![allow(dead_code)]

use std::collections::BTreeSet;

use credal_core::decide::DecisionProblem;
use credal_core::deduction::ProbStatement;
use credal_core::kernel::{lp_optimize, Interval, LinearConstraint, LinearSystem, Rational, Relation, Sense};
use credal_core::pdb::{project_table, AttributeSpec, Database, ProbTable};
use credal_core::Formula;
use num_traits::{One, Zero};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

// ---------------------------------------------------------------------------
// Integer vertex oracle

#[derive(Debug, Clone)]
pub struct IntSystem {
    pub n: usize,
    pub rows: Vec<(Vec<i64>, Relation, i64)>,
    /// Adds `Σ x = 1`.
    pub normalized: bool,
}

impl IntSystem {
    pub fn to_linear(&self) -> LinearSystem {
        let mut system =
            if self.normalized { LinearSystem::simplex(self.n) } else { LinearSystem::unnormalized(self.n) };
        for (a, rel, b) in &self.rows {
            let coefficients = a.iter().map(|&c| Rational::from_integer(c.into())).collect();
            system.push(LinearConstraint::new(coefficients, *rel, Rational::from_integer((*b).into())));
        }
        system
    }

    fn all_rows(&self) -> Vec<(Vec<i64>, Relation, i64)> {
        let mut rows = self.rows.clone();
        if self.normalized {
            rows.push((vec![1; self.n], Relation::Eq, 1));
        }
        for k in 0..self.n {
            let mut e = vec![0; self.n];
            e[k] = 1;
            rows.push((e, Relation::Ge, 0));
        }
        rows
    }
}

/// Solves `M x = r` by fraction-free elimination; returns `(numerators,
/// denominator)` when `M` is nonsingular.
fn bareiss_solve(mut m: Vec<Vec<i128>>) -> Option<(Vec<i128>, i128)> {
    let n = m.len();
    let mut prev = 1i128;
    for k in 0..n {
        let pivot = (k..n).find(|&r| m[r][k] != 0)?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    let det = m[n - 1][n - 1];
    // Back substitution keeps x_i = num_i / det exactly.
    let mut num = vec![0i128; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n] * det;
        for j in i + 1..n {
            acc -= m[i][j] * num[j];
        }
        assert_eq!(acc % m[i][i], 0, "Cramer numerators are integral");
        num[i] = acc / m[i][i];
    }
    Some((num, det))
}

fn combinations(len: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(start: usize, len: usize, k: usize, chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if chosen.len() == k {
            return f(chosen);
        }
        for i in start..len {
            chosen.push(i);
            if go(i + 1, len, k, chosen, f) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(0, len, k, &mut Vec::with_capacity(k), f);
}

/// Calls `f` with `(numerators, denominator)` for every vertex, stopping
/// when it returns true. With `x >= 0` the set is pointed, so it is nonempty
/// exactly when some vertex exists.
fn for_each_vertex(system: &IntSystem, f: &mut dyn FnMut(&[i128], i128) -> bool) {
    let rows = system.all_rows();
    let n = system.n;
    combinations(rows.len(), n, &mut |pick| {
        let m: Vec<Vec<i128>> = pick
            .iter()
            .map(|&r| {
                let (a, _, b) = &rows[r];
                a.iter().map(|&c| c as i128).chain(std::iter::once(*b as i128)).collect()
            })
            .collect();
        let Some((num, det)) = bareiss_solve(m) else { return false };
        let ok = rows.iter().all(|(a, rel, b)| {
            let lhs: i128 = a.iter().zip(&num).map(|(&c, &x)| c as i128 * x).sum();
            let rhs = *b as i128 * det;
            // Compare lhs/det with b, minding the sign of det.
            let (lhs, rhs) = if det < 0 { (-lhs, -rhs) } else { (lhs, rhs) };
            match rel {
                Relation::Eq => lhs == rhs,
                Relation::Ge => lhs >= rhs,
                Relation::Le => lhs <= rhs,
            }
        });
        ok && f(&num, det)
    });
}

pub fn vertex_oracle_feasible(system: &IntSystem) -> bool {
    let mut found = false;
    for_each_vertex(system, &mut |_, _| {
        found = true;
        true
    });
    found
}

/// Minimum of `c · x` over the vertices of a bounded system.
pub fn vertex_oracle_min(system: &IntSystem, c: &[i64]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for_each_vertex(system, &mut |num, det| {
        let value: i128 = c.iter().zip(num).map(|(&a, &x)| a as i128 * x).sum();
        let v = Rational::new(value.into(), det.into());
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
        false
    });
    best
}

/// Integer copy of a nonnegative system, each row cleared of denominators.
pub fn integer_system(system: &LinearSystem) -> IntSystem {
    assert!(system.nonneg);
    let rows = system
        .constraints
        .iter()
        .map(|row| {
            let lcm = row.coefficients.iter().chain([&row.rhs]).fold(1i64, |acc, x| {
                let d: i64 = x.denom().try_into().unwrap();
                num_integer::lcm(acc, d)
            });
            let int =
                |x: &Rational| -> i64 { (x * Rational::from_integer(lcm.into())).to_integer().try_into().unwrap() };
            (row.coefficients.iter().map(int).collect(), row.relation, int(&row.rhs))
        })
        .collect();
    IntSystem { n: system.variable_count, rows, normalized: system.normalized }
}

pub fn random_int_system(rng: &mut impl Rng) -> IntSystem {
    let n = rng.random_range(1..=6);
    let m = rng.random_range(1..=6);
    let rels = [Relation::Eq, Relation::Ge, Relation::Le];
    let rows = (0..m)
        .map(|_| {
            let a: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
            (a, *rels.choose(rng).unwrap(), rng.random_range(-4..=6))
        })
        .collect();
    IntSystem { n, rows, normalized: rng.random_bool(0.5) }
}

// ---------------------------------------------------------------------------
// Truth-table entailment

pub fn eval(f: &Formula, atoms: &[String], world: usize) -> bool {
    match f {
        Formula::Atom(a) => world >> atoms.iter().position(|x| x == a).expect("known atom") & 1 == 1,
        Formula::Not(g) => !eval(g, atoms, world),
        Formula::And(a, b) => eval(a, atoms, world) && eval(b, atoms, world),
        Formula::Or(a, b) => eval(a, atoms, world) || eval(b, atoms, world),
        Formula::Implies(a, b) => !eval(a, atoms, world) || eval(b, atoms, world),
    }
}

fn atoms_of(fs: &[&Formula]) -> Vec<String> {
    fs.iter().flat_map(|f| f.atoms()).map(str::to_string).collect::<BTreeSet<_>>().into_iter().collect()
}

/// Tightest bounds on `target` over distributions on full atom assignments
/// satisfying the premises; `None` when the premises are inconsistent.
pub fn entailed_interval(premises: &[ProbStatement], target: &Formula) -> Option<Interval> {
    let mut all: Vec<&Formula> = premises.iter().map(|p| &p.sentence).collect();
    all.push(target);
    let atoms = atoms_of(&all);
    let worlds = 1usize << atoms.len();
    let indicator = |f: &Formula| -> Vec<usize> { (0..worlds).filter(|&w| eval(f, &atoms, w)).collect() };
    let mut system = LinearSystem::simplex(worlds);
    for p in premises {
        let ones = indicator(&p.sentence);
        system.push(LinearConstraint::sum_of(worlds, &ones, Relation::Ge, p.bounds.lower().clone()));
        system.push(LinearConstraint::sum_of(worlds, &ones, Relation::Le, p.bounds.upper().clone()));
    }
    let mut objective = vec![Rational::zero(); worlds];
    for w in indicator(target) {
        objective[w] = Rational::one();
    }
    let low = lp_optimize(&system, &objective, Sense::Minimize).ok()?;
    let high = lp_optimize(&system, &objective, Sense::Maximize).ok()?;
    Some(Interval::new(low.value, high.value).unwrap())
}

// ---------------------------------------------------------------------------
// Random knowledge bases

const ATOMS: [&str; 3] = ["A", "B", "C"];

pub fn random_formula(rng: &mut impl Rng, depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.35) {
        return Formula::atom(*ATOMS.choose(rng).unwrap());
    }
    let a = random_formula(rng, depth - 1);
    match rng.random_range(0..4) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, depth - 1)),
        2 => Formula::or(a, random_formula(rng, depth - 1)),
        _ => Formula::implies(a, random_formula(rng, depth - 1)),
    }
}

/// Random distribution over the eight assignments of A, B, C with
/// denominators of 20.
fn random_world_distribution(rng: &mut impl Rng) -> Vec<Rational> {
    let mut weights: Vec<i64> = (0..8).map(|_| rng.random_range(0..5)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| q(w, total)).collect()
}

fn widen(rng: &mut impl Rng, p: &Rational) -> Interval {
    let down = q(rng.random_range(0..=3), 10);
    let up = q(rng.random_range(0..=3), 10);
    let lower = (p - down).max(Rational::zero());
    let upper = (p + up).min(Rational::one());
    Interval::new(lower, upper).unwrap()
}

/// Premises that hold of one hidden distribution, so they are consistent,
/// biased towards the shapes the inference rules consume.
pub fn random_kb(rng: &mut impl Rng) -> (Vec<ProbStatement>, Formula) {
    let atoms: Vec<String> = ATOMS.iter().map(|a| a.to_string()).collect();
    let dist = random_world_distribution(rng);
    let prob = |f: &Formula| -> Rational { (0..8).filter(|&w| eval(f, &atoms, w)).map(|w| dist[w].clone()).sum() };
    let target = Formula::atom(*ATOMS.choose(rng).unwrap());
    let count = rng.random_range(1..=5);
    let mut premises = Vec::new();
    for _ in 0..count {
        let sentence = match rng.random_range(0..5) {
            0 => Formula::implies(random_formula(rng, 1), target.clone()),
            1 => Formula::and(random_formula(rng, 0), random_formula(rng, 0)),
            2 => Formula::atom(*ATOMS.choose(rng).unwrap()),
            3 => target.clone(),
            _ => random_formula(rng, 2),
        };
        let bounds = widen(rng, &prob(&sentence));
        premises.push(ProbStatement::premise(sentence, bounds));
    }
    (premises, target)
}

// ---------------------------------------------------------------------------
// Random decision problems and credal systems

pub fn random_problem(rng: &mut impl Rng, n: usize) -> DecisionProblem {
    let m = rng.random_range(2..=4);
    let utility = (0..m).map(|_| (0..n).map(|_| q(rng.random_range(-8..=8), 4)).collect()).collect();
    DecisionProblem::new((0..m).map(|i| format!("a{i}")).collect(), (0..n).map(|j| format!("c{j}")).collect(), utility)
        .unwrap()
}

pub fn random_row(rng: &mut impl Rng, n: usize) -> LinearConstraint {
    let coefficients = (0..n).map(|_| Rational::from_integer(rng.random_range(-2..=2).into())).collect();
    let rel = if rng.random_bool(0.5) { Relation::Ge } else { Relation::Le };
    LinearConstraint::new(coefficients, rel, q(rng.random_range(-5..=5), 10))
}

// ---------------------------------------------------------------------------
// Random probabilistic databases

pub fn binary(name: &str) -> AttributeSpec {
    AttributeSpec::new(name, vec!["t".into(), "f".into()]).unwrap()
}

/// Marginals of one random joint over two or three binary attributes, so the
/// tables are mutually consistent.
pub fn random_database(rng: &mut impl Rng) -> Database {
    let k = rng.random_range(2..=3);
    let specs: Vec<AttributeSpec> = (0..k).map(|i| binary(&format!("X{i}"))).collect();
    let mut weights: Vec<i64> = (0..1 << k).map(|_| rng.random_range(0..5)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    let joint = ProbTable::dense(specs.clone(), weights.iter().map(|&w| q(w, total)).collect()).unwrap();
    let count = rng.random_range(1..=3);
    let mut tables = Vec::new();
    for _ in 0..count {
        let mut subset: BTreeSet<String> =
            specs.iter().filter(|_| rng.random_bool(0.6)).map(|s| s.name().to_string()).collect();
        if subset.is_empty() {
            subset.insert(specs.choose(rng).unwrap().name().to_string());
        }
        tables.push(project_table(&joint, &subset).unwrap());
    }
    Database::new(specs, tables).unwrap()
}
