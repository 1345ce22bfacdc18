//! Text and JSON-lines rendering of trace records.

use std::io::{self, Write};

use credal_core::decide::{DecisionProblem, Emission};
use credal_core::deduction::{ProbStatement, TraceStep};
use credal_core::kernel::{format_rational, Interval};
use serde_json::{json, Map, Value};

use crate::Format;

pub fn interval_json(i: &Interval) -> Value {
    json!({ "lower": format_rational(i.lower()), "upper": format_rational(i.upper()) })
}

pub struct Printer {
    pub format: Format,
    out: io::Stdout,
}

impl Printer {
    pub fn new(format: Format) -> Self {
        Printer { format, out: io::stdout() }
    }

    pub fn line(&self, text: &str) {
        let mut out = self.out.lock();
        // A closed pipe is not worth failing over.
        let _ = writeln!(out, "{text}");
    }

    pub fn record(&self, text: impl FnOnce() -> String, value: impl FnOnce() -> Value) {
        match self.format {
            Format::Text => self.line(&text()),
            Format::Jsonl => self.line(&value().to_string()),
        }
    }

    pub fn statement(&self, id: usize, s: &ProbStatement) {
        self.record(
            || format!("({}) p({}) in {}", id + 1, s.sentence, s.bounds),
            || json!({ "id": id + 1, "sentence": s.sentence.to_string(), "bounds": interval_json(&s.bounds) }),
        );
    }

    pub fn deduction_step(&self, step: &TraceStep) {
        let inputs: Vec<String> = step.inputs.iter().map(|i| format!("({})", i + 1)).collect();
        self.record(
            || {
                format!(
                    "step={} rule={} inputs={} produced=({}) p({}) in {} target={}",
                    step.index,
                    step.rule.name(),
                    if inputs.is_empty() { "-".to_string() } else { inputs.join(",") },
                    step.produced_id + 1,
                    step.produced.sentence,
                    step.produced.bounds,
                    step.target()
                )
            },
            || {
                json!({
                    "step": step.index,
                    "rule": step.rule.name(),
                    "inputs": step.inputs.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "produced": {
                        "id": step.produced_id + 1,
                        "sentence": step.produced.sentence.to_string(),
                        "bounds": interval_json(&step.produced.bounds),
                    },
                    "target": interval_json(step.target()),
                })
            },
        );
    }

    pub fn emission(&self, backend: &str, problem: &DecisionProblem, e: &Emission) {
        let names = e.admissible.names(problem);
        self.record(
            || {
                let mut text = format!("step={} backend={backend} admissible={}", e.step, names.join(","));
                for (c, i) in problem.conditions().iter().zip(&e.intervals) {
                    text.push_str(&format!(
                        " interval:{c}={},{}",
                        format_rational(i.lower()),
                        format_rational(i.upper())
                    ));
                }
                text
            },
            || {
                let intervals: Map<String, Value> =
                    problem.conditions().iter().zip(&e.intervals).map(|(c, i)| (c.clone(), interval_json(i))).collect();
                json!({ "step": e.step, "backend": backend, "admissible": names, "intervals": intervals })
            },
        );
    }

    pub fn final_line(&self, problem: &DecisionProblem, e: &Emission, fallback: Option<usize>) {
        let names = e.admissible.names(problem);
        let choice = fallback.map(|a| problem.actions()[a].clone());
        self.record(
            || {
                let mut text = format!("final admissible={}", names.join(","));
                if let Some(c) = &choice {
                    text.push_str(&format!(" fallback={c}"));
                }
                text
            },
            || json!({ "final": true, "step": e.step, "admissible": names, "fallback": choice }),
        );
    }
}
