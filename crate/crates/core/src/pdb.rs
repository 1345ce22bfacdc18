//! Probabilistic databases: point-valued marginal tables over named discrete
//! attributes, projection onto refined schemes, and extension systems over
//! joint tuples.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::decide::{admissible_among, CredalDescription, DecisionProblem, Emission};
use crate::error::{Error, Result};
use crate::kernel::{lp_feasible, LinearConstraint, LinearSystem, Rational, Relation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSpec {
    name: String,
    values: Vec<String>,
}

impl AttributeSpec {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Result<Self> {
        let name = name.into();
        if values.len() < 2 {
            return Err(Error::InvalidTable(format!("attribute {name:?} needs at least two values")));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = values.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::InvalidTable(format!("attribute {name:?} repeats value {dup:?}")));
        }
        Ok(AttributeSpec { name, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    fn value_index(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

/// Mixed-radix indexing of value tuples; the first attribute varies slowest.
fn tuple_count(attributes: &[AttributeSpec]) -> usize {
    attributes.iter().map(|a| a.values.len()).product()
}

fn decode(attributes: &[AttributeSpec], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; attributes.len()];
    for (k, a) in attributes.iter().enumerate().rev() {
        digits[k] = index % a.values.len();
        index /= a.values.len();
    }
    digits
}

fn encode(attributes: &[AttributeSpec], digits: &[usize]) -> usize {
    attributes.iter().zip(digits).fold(0, |acc, (a, &d)| acc * a.values.len() + d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbTable {
    attributes: Vec<AttributeSpec>,
    cells: Vec<Rational>,
}

impl ProbTable {
    /// `cells` in tuple order (first attribute slowest).
    pub fn dense(attributes: Vec<AttributeSpec>, cells: Vec<Rational>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::InvalidTable("a table needs at least one attribute".into()));
        }
        let mut names = BTreeSet::new();
        if let Some(dup) = attributes.iter().find(|a| !names.insert(a.name.as_str())) {
            return Err(Error::InvalidTable(format!("attribute {:?} listed twice", dup.name)));
        }
        if cells.len() != tuple_count(&attributes) {
            return Err(Error::InvalidTable(format!("{} cells for {} tuples", cells.len(), tuple_count(&attributes))));
        }
        if cells.iter().any(Signed::is_negative) {
            return Err(Error::InvalidTable("negative cell probability".into()));
        }
        let total: Rational = cells.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidTable(format!("cells sum to {total}, not 1")));
        }
        Ok(ProbTable { attributes, cells })
    }

    /// Every tuple of the cross product must appear exactly once.
    pub fn from_cells(attributes: Vec<AttributeSpec>, cells: Vec<(Vec<String>, Rational)>) -> Result<Self> {
        let mut dense: Vec<Option<Rational>> = vec![None; tuple_count(&attributes)];
        for (tuple, p) in cells {
            if tuple.len() != attributes.len() {
                return Err(Error::InvalidTable(format!("tuple {tuple:?} has the wrong arity")));
            }
            let digits = tuple
                .iter()
                .zip(&attributes)
                .map(|(v, a)| {
                    a.value_index(v).ok_or_else(|| Error::InvalidTable(format!("{v:?} is not a value of {:?}", a.name)))
                })
                .collect::<Result<Vec<_>>>()?;
            let slot = &mut dense[encode(&attributes, &digits)];
            if slot.replace(p).is_some() {
                return Err(Error::InvalidTable(format!("tuple {tuple:?} listed twice")));
            }
        }
        let cells = dense
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| {
                    let tuple: Vec<&str> =
                        decode(&attributes, i).iter().zip(&attributes).map(|(&d, a)| a.values[d].as_str()).collect();
                    Error::InvalidTable(format!("missing cell for {tuple:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ProbTable::dense(attributes, cells)
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn attribute_names(&self) -> BTreeSet<String> {
        self.attributes.iter().map(|a| a.name.clone()).collect()
    }

    pub fn cells(&self) -> &[Rational] {
        &self.cells
    }

    pub fn get(&self, tuple: &[&str]) -> Option<&Rational> {
        if tuple.len() != self.attributes.len() {
            return None;
        }
        let digits: Option<Vec<usize>> = tuple.iter().zip(&self.attributes).map(|(v, a)| a.value_index(v)).collect();
        Some(&self.cells[encode(&self.attributes, &digits?)])
    }

    /// `(tuple, probability)` in tuple order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<&str>, &Rational)> {
        self.cells.iter().enumerate().map(|(i, p)| {
            let tuple =
                decode(&self.attributes, i).iter().zip(&self.attributes).map(|(&d, a)| a.values[d].as_str()).collect();
            (tuple, p)
        })
    }
}

impl fmt::Display for ProbTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.attributes.iter().map(|a| a.name.as_str()).collect();
        writeln!(f, "{}\tp", names.join("\t"))?;
        for (tuple, p) in self.rows() {
            writeln!(f, "{}\t{p}", tuple.join("\t"))?;
        }
        Ok(())
    }
}

/// Marginal of `t` on `onto`, keeping `t`'s attribute order.
pub fn project_table(t: &ProbTable, onto: &BTreeSet<String>) -> Result<ProbTable> {
    if onto.is_empty() {
        return Err(Error::NotASubset("cannot project onto no attributes".into()));
    }
    let names = t.attribute_names();
    if let Some(missing) = onto.iter().find(|a| !names.contains(*a)) {
        return Err(Error::NotASubset(format!("{missing:?} is not an attribute of the table")));
    }
    let keep: Vec<usize> = (0..t.attributes.len()).filter(|&k| onto.contains(&t.attributes[k].name)).collect();
    let attributes: Vec<AttributeSpec> = keep.iter().map(|&k| t.attributes[k].clone()).collect();
    let mut cells = vec![Rational::zero(); tuple_count(&attributes)];
    for (i, p) in t.cells.iter().enumerate() {
        let digits = decode(&t.attributes, i);
        let kept: Vec<usize> = keep.iter().map(|&k| digits[k]).collect();
        cells[encode(&attributes, &kept)] += p;
    }
    ProbTable::dense(attributes, cells)
}

/// A set of attribute sets; equality ignores order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scheme {
    sets: Vec<BTreeSet<String>>,
}

impl Scheme {
    pub fn new<I, S>(sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        let mut sets: Vec<BTreeSet<String>> =
            sets.into_iter().map(|s| s.into_iter().map(Into::into).collect()).collect();
        if sets.iter().any(BTreeSet::is_empty) {
            return Err(Error::InvalidTable("a scheme element is empty".into()));
        }
        sets.sort();
        sets.dedup();
        Ok(Scheme { sets })
    }

    pub fn sets(&self) -> &[BTreeSet<String>] {
        &self.sets
    }

    pub fn attributes(&self) -> BTreeSet<String> {
        self.sets.iter().flatten().cloned().collect()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> =
            self.sets.iter().map(|s| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", "))).collect();
        write!(f, "{{{}}}", inner.join(", "))
    }
}

/// Every element of `s` lies inside some element of `s_prime`.
pub fn is_refinement(s: &Scheme, s_prime: &Scheme) -> bool {
    s.sets.iter().all(|v| s_prime.sets.iter().any(|w| v.is_subset(w)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    attributes: Vec<AttributeSpec>,
    tables: Vec<ProbTable>,
}

impl Database {
    /// Checks that table attributes are declared and that tables sharing an
    /// attribute agree on its marginal.
    pub fn new(attributes: Vec<AttributeSpec>, tables: Vec<ProbTable>) -> Result<Self> {
        let mut names = BTreeSet::new();
        if let Some(dup) = attributes.iter().find(|a| !names.insert(a.name.as_str())) {
            return Err(Error::InvalidTable(format!("attribute {:?} declared twice", dup.name)));
        }
        for t in &tables {
            for a in &t.attributes {
                match attributes.iter().find(|s| s.name == a.name) {
                    Some(spec) if spec == a => {}
                    Some(_) => {
                        return Err(Error::InvalidTable(format!("attribute {:?} has conflicting values", a.name)))
                    }
                    None => return Err(Error::InvalidTable(format!("attribute {:?} is not declared", a.name))),
                }
            }
        }
        let mut marginals: HashMap<&str, (usize, ProbTable)> = HashMap::new();
        for (k, t) in tables.iter().enumerate() {
            for a in &t.attributes {
                let single = project_table(t, &BTreeSet::from([a.name.clone()]))?;
                match marginals.get(a.name.as_str()) {
                    Some((first, m)) if *m != single => {
                        return Err(Error::InconsistentDatabase(format!(
                            "tables {} and {} disagree on the marginal of {:?}",
                            first + 1,
                            k + 1,
                            a.name
                        )))
                    }
                    Some(_) => {}
                    None => {
                        marginals.insert(a.name.as_str(), (k, single));
                    }
                }
            }
        }
        Ok(Database { attributes, tables })
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeSpec> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn tables(&self) -> &[ProbTable] {
        &self.tables
    }

    pub fn scheme(&self) -> Scheme {
        Scheme::new(self.tables.iter().map(ProbTable::attribute_names)).expect("tables have attributes")
    }

    /// Declared attributes that appear in some table, in declaration order.
    pub fn used_attributes(&self) -> Vec<String> {
        let used = self.scheme().attributes();
        self.attributes.iter().filter(|a| used.contains(&a.name)).map(|a| a.name.clone()).collect()
    }
}

/// One table per element of `s`, each the marginal of a covering table.
/// Several covering tables must agree.
pub fn project_db(db: &Database, s: &Scheme) -> Result<Database> {
    let mut tables = Vec::with_capacity(s.sets.len());
    for v in &s.sets {
        let covers: Vec<&ProbTable> = db.tables.iter().filter(|t| v.is_subset(&t.attribute_names())).collect();
        let Some(first) = covers.first() else {
            return Err(Error::NotARefinement(format!("no table covers {v:?}")));
        };
        let projected = project_table(first, v)?;
        for other in &covers[1..] {
            let alt = project_table(other, v)?;
            if alt.cells != projected.cells || alt.attributes != projected.attributes {
                return Err(Error::AmbiguousProjection(format!("covering tables disagree on {v:?}")));
            }
        }
        tables.push(projected);
    }
    Database::new(db.attributes.clone(), tables)
}

/// Joint unknowns over a set of attributes with one equality per table cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionSystem {
    pub over: Vec<AttributeSpec>,
    pub system: LinearSystem,
}

/// The extension of `db` over `over` (attribute names in variable order;
/// `None` uses every attribute that occurs in a table).
pub fn extension_system(db: &Database, over: Option<&[String]>) -> Result<ExtensionSystem> {
    let names: Vec<String> = match over {
        Some(o) => o.to_vec(),
        None => db.used_attributes(),
    };
    let over: Vec<AttributeSpec> = names
        .iter()
        .map(|n| db.attribute(n).cloned().ok_or_else(|| Error::Unknown(format!("attribute {n:?}"))))
        .collect::<Result<_>>()?;
    let n = tuple_count(&over);
    let mut system = LinearSystem::simplex(n);
    for t in &db.tables {
        let positions: Vec<usize> =
            t.attributes
                .iter()
                .map(|a| {
                    names.iter().position(|x| *x == a.name).ok_or_else(|| {
                        Error::NotASubset(format!("table attribute {:?} is outside the extension", a.name))
                    })
                })
                .collect::<Result<_>>()?;
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); t.cells.len()];
        for v in 0..n {
            let digits = decode(&over, v);
            let cell: Vec<usize> = positions.iter().map(|&k| digits[k]).collect();
            rows[encode(&t.attributes, &cell)].push(v);
        }
        for (vars, p) in rows.iter().zip(&t.cells) {
            system.push(LinearConstraint::sum_of(n, vars, Relation::Eq, p.clone()));
        }
    }
    Ok(ExtensionSystem { over, system })
}

/// Decision conditions as sets of value tuples over condition attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionTuples {
    pub attributes: Vec<String>,
    /// Per condition, the tuples (in `attributes` order) it comprises.
    pub conditions: Vec<Vec<Vec<String>>>,
}

impl ExtensionSystem {
    pub fn variable_count(&self) -> usize {
        self.system.variable_count
    }

    /// Value labels of joint unknown `v`.
    pub fn tuple(&self, v: usize) -> Vec<&str> {
        decode(&self.over, v).iter().zip(&self.over).map(|(&d, a)| a.values[d].as_str()).collect()
    }

    /// Pairs the system with condition index sets. The condition tuples must
    /// partition the product of the condition attributes.
    pub fn credal(&self, conditions: &ConditionTuples) -> Result<CredalDescription> {
        let positions: Vec<usize> = conditions
            .attributes
            .iter()
            .map(|c| self.over.iter().position(|a| a.name == *c).ok_or_else(|| Error::UncoveredCondition(c.clone())))
            .collect::<Result<_>>()?;
        let mut owner: HashMap<Vec<&str>, usize> = HashMap::new();
        for (j, tuples) in conditions.conditions.iter().enumerate() {
            for tuple in tuples {
                let key: Vec<&str> = tuple.iter().map(String::as_str).collect();
                if key.len() != positions.len() {
                    return Err(Error::InvalidProblem(format!("condition tuple {tuple:?} has the wrong arity")));
                }
                for (&k, v) in positions.iter().zip(&key) {
                    if self.over[k].value_index(v).is_none() {
                        return Err(Error::InvalidProblem(format!("{v:?} is not a value of {:?}", self.over[k].name)));
                    }
                }
                if owner.insert(key, j).is_some() {
                    return Err(Error::ConditionPartition(format!("tuple {tuple:?} belongs to two conditions")));
                }
            }
        }
        let product: usize = positions.iter().map(|&k| self.over[k].values.len()).product();
        if owner.len() != product {
            return Err(Error::ConditionPartition(format!(
                "conditions cover {} of {product} condition tuples",
                owner.len()
            )));
        }
        let mut map = vec![Vec::new(); conditions.conditions.len()];
        for v in 0..self.variable_count() {
            let tuple = self.tuple(v);
            let key: Vec<&str> = positions.iter().map(|&k| tuple[k]).collect();
            map[owner[&key]].push(v);
        }
        CredalDescription::new(self.system.clone(), map)
    }
}

/// Singletons of the condition attributes, their intersections with scheme
/// elements, the scheme elements meeting them, then the whole scheme;
/// repeated consecutive rungs are dropped.
pub fn scheme_ladder(db: &Database, v_c: &BTreeSet<String>) -> Result<Vec<Scheme>> {
    let scheme = db.scheme();
    let covered = scheme.attributes();
    if let Some(missing) = v_c.iter().find(|v| !covered.contains(*v)) {
        return Err(Error::UncoveredCondition(missing.clone()));
    }
    let meeting: Vec<&BTreeSet<String>> = scheme.sets.iter().filter(|v| !v.is_disjoint(v_c)).collect();
    let rungs = [
        Scheme::new(v_c.iter().map(|v| [v.clone()]))?,
        Scheme::new(meeting.iter().map(|v| v.intersection(v_c).cloned().collect::<Vec<_>>()))?,
        Scheme::new(meeting.iter().map(|v| v.iter().cloned().collect::<Vec<_>>()))?,
        scheme,
    ];
    let mut ladder: Vec<Scheme> = Vec::new();
    for rung in rungs {
        if ladder.last() != Some(&rung) {
            ladder.push(rung);
        }
    }
    Ok(ladder)
}

/// Database-driven loop: one emission per ladder rung.
pub struct PdbDecision<'a> {
    problem: &'a DecisionProblem,
    db: &'a Database,
    conditions: ConditionTuples,
    ladder: Vec<Scheme>,
    next: usize,
    surviving: Vec<usize>,
    done: bool,
}

impl<'a> PdbDecision<'a> {
    pub fn new(problem: &'a DecisionProblem, db: &'a Database, conditions: ConditionTuples) -> Result<Self> {
        if conditions.conditions.len() != problem.conditions().len() {
            return Err(Error::InvalidProblem(format!(
                "{} condition tuple sets for {} conditions",
                conditions.conditions.len(),
                problem.conditions().len()
            )));
        }
        let v_c: BTreeSet<String> = conditions.attributes.iter().cloned().collect();
        let ladder = scheme_ladder(db, &v_c)?;
        Ok(PdbDecision {
            problem,
            db,
            conditions,
            ladder,
            next: 0,
            surviving: (0..problem.actions().len()).collect(),
            done: false,
        })
    }

    pub fn ladder(&self) -> &[Scheme] {
        &self.ladder
    }

    /// Credal description of rung `index`.
    pub fn rung_credal(&self, index: usize) -> Result<CredalDescription> {
        let scheme = &self.ladder[index];
        let projected = project_db(self.db, scheme)?;
        let extension = extension_system(&projected, None)?;
        if !lp_feasible(&extension.system)? {
            return Err(Error::InconsistentDatabase(format!("no joint distribution matches the tables of {scheme}")));
        }
        extension.credal(&self.conditions)
    }

    fn advance(&mut self) -> Result<Option<Emission>> {
        if self.next >= self.ladder.len() {
            return Ok(None);
        }
        let credal = self.rung_credal(self.next)?;
        let admissible = admissible_among(self.problem, &credal, &self.surviving)?;
        let intervals = credal.condition_bounds()?;
        self.surviving = admissible.actions.clone();
        self.next += 1;
        Ok(Some(Emission { step: self.next, admissible, intervals }))
    }
}

impl Iterator for PdbDecision<'_> {
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

pub fn anytime_decide_pdb(
    problem: &DecisionProblem,
    db: &Database,
    conditions: ConditionTuples,
) -> Result<Vec<Emission>> {
    PdbDecision::new(problem, db, conditions)?.collect()
}
