use num_traits::{One, Zero};

use super::{ProbStatement, Rule};
use crate::error::{Error, Result};
use crate::kernel::{Interval, Rational};
use crate::logic::Formula;

fn clamp_lower(value: Rational) -> Rational {
    value.max(Rational::zero())
}

fn checked(lower: Rational, upper: Rational) -> Interval {
    Interval::new(lower, upper).expect("rule bounds stay inside [0, 1] with lower <= upper")
}

/// `p(α) ∈ [0, 1]`.
pub fn rule_trivial(sentence: Formula) -> ProbStatement {
    ProbStatement::derived(sentence, Interval::unit(), Rule::TrivialDerivation)
}

/// From `p(β) ∈ [x, y]` and `p(β → α) ∈ [u, v]` derive `p(α) ∈ [max(0, x + u − 1), v]`.
pub fn rule_forward_implication(antecedent: &ProbStatement, implication: &ProbStatement) -> Result<ProbStatement> {
    let Formula::Implies(lhs, consequent) = &implication.sentence else {
        return Err(Error::ShapeMismatch(format!("{} is not an implication", implication.sentence)));
    };
    if **lhs != antecedent.sentence {
        return Err(Error::ShapeMismatch(format!(
            "antecedent of {} is not {}",
            implication.sentence, antecedent.sentence
        )));
    }
    let x = antecedent.bounds.lower();
    let (u, v) = (implication.bounds.lower(), implication.bounds.upper());
    let lower = clamp_lower(x + u - Rational::one());
    Ok(ProbStatement::derived((**consequent).clone(), checked(lower, v.clone()), Rule::ForwardImplication))
}

/// From `p(α) ∈ [x, y]` and `p(β) ∈ [u, v]` derive
/// `p(α & β) ∈ [max(0, x + u − 1), min(y, v)]`.
pub fn rule_conjunction(s1: &ProbStatement, s2: &ProbStatement) -> ProbStatement {
    let (x, y) = (s1.bounds.lower(), s1.bounds.upper());
    let (u, v) = (s2.bounds.lower(), s2.bounds.upper());
    let lower = clamp_lower(x + u - Rational::one());
    let upper = y.min(v).clone();
    ProbStatement::derived(
        Formula::and(s1.sentence.clone(), s2.sentence.clone()),
        checked(lower, upper),
        Rule::ConjunctionIntroduction,
    )
}

/// Intersects two intervals on the same sentence.
pub fn rule_multiple(s1: &ProbStatement, s2: &ProbStatement) -> Result<ProbStatement> {
    if s1.sentence != s2.sentence {
        return Err(Error::SentenceMismatch(s1.sentence.to_string(), s2.sentence.to_string()));
    }
    let bounds = s1
        .bounds
        .intersect(&s2.bounds)
        .ok_or_else(|| Error::InconsistentPremises { sentence: s1.sentence.to_string() })?;
    Ok(ProbStatement::derived(s1.sentence.clone(), bounds, Rule::MultipleDerivation))
}
