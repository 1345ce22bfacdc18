//! JSON input files. Rationals are strings ("13/20", "0.65") or JSON
//! numbers; formulas use the text syntax of [`Formula::parse`].

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::decide::{DecisionProblem, NilssonSetup};
use crate::deduction::{KnowledgeBase, ProbStatement};
use crate::error::{Error, Result};
use crate::kernel::{serde_rational, Interval, Rational};
use crate::logic::Formula;
use crate::pdb::{AttributeSpec, ConditionTuples, Database, ProbTable};
use crate::worlds::TreeLayout;

/// A rational written as a string or number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Num(#[serde(with = "serde_rational")] pub Rational);

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidFile {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line ").next().unwrap_or_default().to_string(),
    })
}

fn formula(text: &str, context: impl Fn() -> String) -> Result<Formula> {
    Formula::parse(text).map_err(|e| e.at(context()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementEntry {
    pub sentence: String,
    pub lower: Num,
    pub upper: Num,
}

impl StatementEntry {
    fn resolve(&self, k: usize) -> Result<ProbStatement> {
        let context = || format!("statement {}", k + 1);
        let sentence = formula(&self.sentence, context)?;
        let bounds = Interval::new(self.lower.0.clone(), self.upper.0.clone()).map_err(|e| e.at(context()))?;
        Ok(ProbStatement::premise(sentence, bounds))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbFile {
    pub statements: Vec<StatementEntry>,
    pub target: String,
    /// Condition sentences, in decision-problem order, for deduction-driven
    /// decisions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbInput {
    pub kb: KnowledgeBase,
    pub conditions: Option<Vec<Formula>>,
}

pub fn load_kb(text: &str) -> Result<KbInput> {
    let file: KbFile = parse_json(text)?;
    let statements = file.statements.iter().enumerate().map(|(k, s)| s.resolve(k)).collect::<Result<_>>()?;
    let target = formula(&file.target, || "target".into())?;
    let conditions = file
        .conditions
        .map(|cs| {
            cs.iter()
                .enumerate()
                .map(|(k, c)| formula(c, || format!("condition {}", k + 1)))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok(KbInput { kb: KnowledgeBase { statements, target }, conditions })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub actions: Vec<String>,
    pub conditions: Vec<String>,
    /// One row per action, one column per condition.
    pub utility: Vec<Vec<Num>>,
}

pub fn load_problem(text: &str) -> Result<DecisionProblem> {
    let file: ProblemFile = parse_json(text)?;
    let utility = file.utility.into_iter().map(|row| row.into_iter().map(|n| n.0).collect()).collect();
    DecisionProblem::new(file.actions, file.conditions, utility)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayoutKind {
    TargetFirst,
    ConditionFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolFile {
    pub layout: LayoutKind,
    /// Root sentence of a target-first tree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// Condition sentences in decision-problem order.
    pub conditions: Vec<String>,
    pub sentences: Vec<StatementEntry>,
    /// Pool indices to add, in order; defaults to file order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

pub fn load_pool(text: &str) -> Result<NilssonSetup> {
    let file: PoolFile = parse_json(text)?;
    let conditions: Vec<Formula> = file
        .conditions
        .iter()
        .enumerate()
        .map(|(k, c)| formula(c, || format!("condition {}", k + 1)))
        .collect::<Result<_>>()?;
    let layout = match file.layout {
        LayoutKind::TargetFirst => {
            let target = file
                .target
                .as_deref()
                .ok_or_else(|| Error::InvalidProblem("a target-first pool needs a target".into()))?;
            TreeLayout::TargetFirst(formula(target, || "target".into())?)
        }
        LayoutKind::ConditionFirst => TreeLayout::ConditionFirst(conditions.clone()),
    };
    let pool = file
        .sentences
        .iter()
        .enumerate()
        .map(|(k, s)| s.resolve(k).map(|st| (st.sentence, st.bounds)))
        .collect::<Result<Vec<_>>>()?;
    let order = file.order.unwrap_or_else(|| (0..pool.len()).collect());
    Ok(NilssonSetup { layout, conditions, pool, order })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeEntry {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub attributes: Vec<String>,
    /// Each row lists one value per attribute followed by the probability.
    pub cells: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatabaseFile {
    pub attributes: Vec<AttributeEntry>,
    pub tables: Vec<TableEntry>,
}

pub fn load_database(text: &str) -> Result<Database> {
    let file: DatabaseFile = parse_json(text)?;
    let specs: Vec<AttributeSpec> =
        file.attributes.into_iter().map(|a| AttributeSpec::new(a.name, a.values)).collect::<Result<_>>()?;
    let mut tables = Vec::with_capacity(file.tables.len());
    for (k, entry) in file.tables.into_iter().enumerate() {
        let context = || format!("table {}", k + 1);
        let attributes: Vec<AttributeSpec> = entry
            .attributes
            .iter()
            .map(|name| {
                specs
                    .iter()
                    .find(|s| s.name() == name)
                    .cloned()
                    .ok_or_else(|| Error::Unknown(format!("attribute {name:?}")).at(context()))
            })
            .collect::<Result<_>>()?;
        let cells = entry
            .cells
            .into_iter()
            .map(|mut row| {
                let p = row.pop().ok_or_else(|| Error::InvalidTable("empty cell row".into()).at(context()))?;
                let p = crate::kernel::parse_rational(&p).map_err(|e| e.at(context()))?;
                Ok((row, p))
            })
            .collect::<Result<Vec<_>>>()?;
        tables.push(ProbTable::from_cells(attributes, cells).map_err(|e| e.at(context()))?);
    }
    Database::new(specs, tables)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionTuplesFile {
    pub attributes: Vec<String>,
    /// Condition name to the value tuples it comprises.
    pub conditions: BTreeMap<String, Vec<Vec<String>>>,
}

/// Condition tuples reordered to match the problem's conditions.
pub fn load_condition_tuples(text: &str, problem: &DecisionProblem) -> Result<ConditionTuples> {
    let mut file: ConditionTuplesFile = parse_json(text)?;
    let conditions = problem
        .conditions()
        .iter()
        .map(|name| {
            file.conditions
                .remove(name)
                .ok_or_else(|| Error::InvalidProblem(format!("no tuples given for condition {name:?}")))
        })
        .collect::<Result<_>>()?;
    if let Some(extra) = file.conditions.keys().next() {
        return Err(Error::InvalidProblem(format!("{extra:?} is not a condition of the problem")));
    }
    Ok(ConditionTuples { attributes: file.attributes, conditions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kb_round_trip() {
        let text = r#"{"statements":[{"sentence":"A -> B","lower":"0.65","upper":1}],"target":"B"}"#;
        let input = load_kb(text).unwrap();
        assert_eq!(input.kb.statements[0].bounds.lower(), &crate::kernel::ratio(13, 20));
        assert_eq!(input.kb.target, Formula::atom("B"));
        assert!(input.conditions.is_none());
    }

    #[test]
    fn json_errors_carry_position() {
        let err = load_kb("{\n  \"statements\": [,]\n}").unwrap_err();
        assert!(matches!(err, Error::InvalidFile { line: 2, .. }), "{err}");
        let err = load_kb(r#"{"statements":[{"sentence":"A &","lower":"0","upper":"1"}],"target":"A"}"#).unwrap_err();
        assert!(matches!(err.root(), Error::ParseFormula { .. }));
        assert!(err.to_string().starts_with("statement 1"));
    }

    #[test]
    fn tuples_follow_problem_order() {
        let problem = DecisionProblem::new(
            vec!["a".into(), "b".into()],
            vec!["wet".into(), "dry".into()],
            vec![vec![Rational::from_integer(1.into()); 2]; 2],
        )
        .unwrap();
        let text = r#"{"attributes":["Rain"],"conditions":{"dry":[["no"]],"wet":[["yes"]]}}"#;
        let tuples = load_condition_tuples(text, &problem).unwrap();
        assert_eq!(tuples.conditions[0], vec![vec!["yes".to_string()]]);
    }
}
