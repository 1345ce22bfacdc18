use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use credal_core::decide::{fallback_choose, Emission, Fallback, FhDecision, NilssonDecision};
use credal_core::deduction::DeductionEngine;
use credal_core::format::{load_condition_tuples, load_database, load_kb, load_pool, load_problem};
use credal_core::kernel::{format_rational, parse_rational, Rational};
use credal_core::maxent::{
    centroid, conjunction_segment, ecc_sweep, eccentricity, expected_ecc_mc, maxent_conjunction, modus_ponens_segment,
    EccMode, Point,
};
use credal_core::pdb::PdbDecision;
use credal_core::{Error, Formula};
use serde_json::json;

use crate::output::Printer;
use crate::{Backend, Cli, Command, DecideArgs, FallbackKind, MaxentCommand, McMode, Pattern, RunConfig};

const DEFAULT_BUDGET: u64 = 1000;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::InconsistentPremises { .. }
            | Error::InfeasibleCredal
            | Error::Infeasible
            | Error::InconsistentDatabase(_) => 2,
            Error::LeafLimitExceeded { .. } => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn in_file<T>(path: &Path, result: credal_core::Result<T>) -> Result<T, Failure> {
    result.map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

struct Limits {
    budget: u64,
    started: Instant,
    deadline: Option<Duration>,
}

impl Limits {
    fn new(run: &RunConfig) -> Self {
        Limits {
            budget: run.budget.unwrap_or(DEFAULT_BUDGET),
            started: Instant::now(),
            deadline: run.deadline_ms.map(Duration::from_millis),
        }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| self.started.elapsed() >= d)
    }
}

pub fn run(cli: &Cli) -> Result<(), Failure> {
    let printer = Printer::new(cli.run.format);
    match &cli.command {
        Command::Deduce { kb, target } => deduce(&cli.run, &printer, kb, target.as_deref()),
        Command::Decide(args) => decide(&cli.run, &printer, args),
        Command::Maxent(cmd) => maxent(&cli.run, &printer, cmd),
        Command::ReproducePaper => {
            if crate::reproduce::run(&printer) {
                Ok(())
            } else {
                Err(usage("some checks failed"))
            }
        }
    }
}

fn deduce(run: &RunConfig, printer: &Printer, path: &Path, target: Option<&str>) -> Result<(), Failure> {
    let mut input = in_file(path, load_kb(&read(path)?))?;
    if let Some(t) = target {
        input.kb.target = Formula::parse(t).map_err(|e| usage(format!("--target: {e}")))?;
    }
    let limits = Limits::new(run);
    let mut engine = DeductionEngine::new(&input.kb);
    if run.trace {
        for (id, s) in input.kb.statements.iter().enumerate() {
            printer.statement(id, s);
        }
    }
    while (engine.steps_taken() as u64) < limits.budget && !limits.expired() {
        match engine.step()? {
            Some(step) => printer.deduction_step(&step),
            None => break,
        }
    }
    Ok(())
}

fn decide(run: &RunConfig, printer: &Printer, args: &DecideArgs) -> Result<(), Failure> {
    let problem = in_file(&args.problem, load_problem(&read(&args.problem)?))?;
    let limits = Limits::new(run);
    let db;
    let (backend, emissions): (&str, Box<dyn Iterator<Item = credal_core::Result<Emission>> + '_>);
    match args.backend {
        Backend::Fh => {
            let path = args.kb.as_deref().ok_or_else(|| usage("--kb is required for the fh backend"))?;
            let input = in_file(path, load_kb(&read(path)?))?;
            let conditions = input
                .conditions
                .ok_or_else(|| usage(format!("{}: the fh backend needs a \"conditions\" list", path.display())))?;
            let budget = limits.budget.try_into().unwrap_or(usize::MAX);
            backend = "fh";
            emissions = Box::new(FhDecision::new(&problem, input.kb.statements, conditions, budget)?);
        }
        Backend::Nilsson => {
            let path = args.pool.as_deref().ok_or_else(|| usage("--pool is required for the nilsson backend"))?;
            let setup = in_file(path, load_pool(&read(path)?))?;
            let mut nilsson = NilssonDecision::new(&problem, setup)?;
            if let Some(cap) = args.leaf_cap {
                nilsson = nilsson.with_leaf_cap(cap);
            }
            backend = "nilsson";
            emissions = Box::new(MatrixTrace { inner: nilsson, printer, trace: run.trace });
        }
        Backend::Pdb => {
            let db_path = args.db.as_deref().ok_or_else(|| usage("--db is required for the pdb backend"))?;
            let cond_path =
                args.conditions.as_deref().ok_or_else(|| usage("--conditions is required for the pdb backend"))?;
            db = in_file(db_path, load_database(&read(db_path)?))?;
            let tuples = in_file(cond_path, load_condition_tuples(&read(cond_path)?, &problem))?;
            backend = "pdb";
            emissions = Box::new(PdbDecision::new(&problem, &db, tuples)?);
        }
    }
    let mut last: Option<Emission> = None;
    let mut count = 0u64;
    for e in emissions {
        let e = e?;
        printer.emission(backend, &problem, &e);
        last = Some(e);
        count += 1;
        if count >= limits.budget || limits.expired() {
            break;
        }
    }
    let last = last.ok_or_else(|| usage("no step was taken"))?;
    let choice = args
        .fallback
        .map(|kind| {
            let criterion = match kind {
                FallbackKind::Random => Fallback::Random { seed: run.seed.unwrap_or(0) },
                FallbackKind::Maximin => Fallback::Maximin,
                FallbackKind::Midpoint => Fallback::Midpoint(last.intervals.clone()),
            };
            fallback_choose(&problem, &last.admissible, &criterion)
        })
        .transpose()?;
    printer.final_line(&problem, &last, choice);
    Ok(())
}

/// Prints the world matrix ahead of each worlds-loop emission.
struct MatrixTrace<'a, 'p> {
    inner: NilssonDecision<'p>,
    printer: &'a Printer,
    trace: bool,
}

impl Iterator for MatrixTrace<'_, '_> {
    type Item = credal_core::Result<Emission>;

    fn next(&mut self) -> Option<Self::Item> {
        let item = self.inner.next()?;
        if self.trace && item.is_ok() {
            if let Some(tree) = self.inner.tree() {
                let matrix = tree.matrix();
                self.printer.record(
                    || matrix.to_string().trim_end().to_string(),
                    || json!({ "leaves": tree.leaves().len(), "matrix": matrix.rows() }),
                );
            }
        }
        Some(item)
    }
}

fn probability(name: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| usage(format!("--{name}: {e}")))
}

fn maxent(run: &RunConfig, printer: &Printer, cmd: &MaxentCommand) -> Result<(), Failure> {
    match cmd {
        MaxentCommand::Ecc { pattern, a, b, point } => {
            let (a, b) = (probability("a", a)?, probability("b", b)?);
            let seg = match pattern {
                Pattern::Conjunction => conjunction_segment(&a, &b)?,
                Pattern::ModusPonens => modus_ponens_segment(&a, &b)?,
            };
            let p: Point = match point.as_str() {
                "maxent" => match pattern {
                    Pattern::Conjunction => maxent_conjunction(&a, &b),
                    // The centroid is the maximum-entropy point of this pattern.
                    Pattern::ModusPonens => centroid(&seg),
                },
                "centroid" => centroid(&seg),
                "v1" => seg.v1.clone(),
                "v2" => seg.v2.clone(),
                list => {
                    let parts: Vec<Rational> =
                        list.split(',').map(|x| probability("point", x.trim())).collect::<Result<_, _>>()?;
                    parts.try_into().map_err(|_| usage("--point needs four comma-separated values"))?
                }
            };
            let report = eccentricity(&p, &seg)?;
            printer.record(
                || format!("ecc^2={} ecc={}", format_rational(&report.ecc_squared), report.ecc),
                || json!({ "ecc_squared": format_rational(&report.ecc_squared), "ecc": report.ecc }),
            );
        }
        MaxentCommand::Sweep { steps } => {
            if *steps < 2 {
                return Err(usage("--steps must be at least 2"));
            }
            printer.line("a,b,ecc_of_maxent");
            for row in ecc_sweep(*steps)? {
                printer.line(&format!("{},{},{}", format_rational(&row.a), format_rational(&row.b), row.ecc));
            }
        }
        MaxentCommand::Mc { mode, samples } => {
            if *samples == 0 {
                return Err(usage("--samples must be at least 1"));
            }
            let mode = match mode {
                McMode::Maxent => EccMode::MaxentPoint,
                McMode::Uniform => EccMode::UniformPoint,
            };
            let estimate = expected_ecc_mc(mode, *samples, run.seed.unwrap_or(0));
            printer.record(
                || format!("estimate={estimate} samples={samples}"),
                || json!({ "estimate": estimate, "samples": samples }),
            );
        }
    }
    Ok(())
}
