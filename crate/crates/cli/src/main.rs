//! `credal`: anytime decisions from interval probabilities.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 inconsistent beliefs
//! (contradictory premises, empty credal set or database extension),
//! 3 semantic tree leaf cap exceeded.

mod commands;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "credal", version, about = "Anytime E-admissibility over interval-valued beliefs")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Maximum number of steps (deduction steps, sentences or rungs).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
    /// Stop at the first step boundary after this many milliseconds.
    #[arg(long, global = true)]
    pub deadline_ms: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print extra detail (premises, world matrices).
    #[arg(long, global = true)]
    pub trace: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the interval deduction engine on a knowledge base.
    Deduce {
        kb: PathBuf,
        /// Override the file's target sentence.
        #[arg(long)]
        target: Option<String>,
    },
    /// Stream admissible sets for a decision problem.
    Decide(DecideArgs),
    /// Eccentricity and maximum-entropy analysis.
    #[command(subcommand)]
    Maxent(MaxentCommand),
    /// Check every worked example against the bundled fixtures.
    ReproducePaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Fh,
    Nilsson,
    Pdb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FallbackKind {
    Random,
    Maximin,
    Midpoint,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    pub problem: PathBuf,
    #[arg(long, value_enum)]
    pub backend: Backend,
    /// Knowledge base with condition sentences (fh).
    #[arg(long, required_if_eq("backend", "fh"))]
    pub kb: Option<PathBuf>,
    /// Sentence pool (nilsson).
    #[arg(long, required_if_eq("backend", "nilsson"))]
    pub pool: Option<PathBuf>,
    /// Probabilistic database (pdb).
    #[arg(long, required_if_eq("backend", "pdb"))]
    pub db: Option<PathBuf>,
    /// Condition tuples over database attributes (pdb).
    #[arg(long, required_if_eq("backend", "pdb"))]
    pub conditions: Option<PathBuf>,
    /// Semantic tree leaf cap (nilsson).
    #[arg(long)]
    pub leaf_cap: Option<usize>,
    /// Pick one action from the final admissible set.
    #[arg(long, value_enum)]
    pub fallback: Option<FallbackKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pattern {
    Conjunction,
    ModusPonens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McMode {
    Maxent,
    Uniform,
}

#[derive(Debug, Subcommand)]
pub enum MaxentCommand {
    /// Eccentricity of a point of a two-sentence solution segment.
    Ecc {
        #[arg(long, value_enum)]
        pattern: Pattern,
        /// p(A), or p(P) for modus ponens.
        #[arg(long)]
        a: String,
        /// p(B), or p(P -> Q) for modus ponens.
        #[arg(long)]
        b: String,
        /// maxent, centroid, v1, v2 or four comma-separated probabilities.
        #[arg(long, default_value = "maxent")]
        point: String,
    },
    /// CSV of the independence point's eccentricity over a grid.
    Sweep {
        /// Grid denominator; values run over k/steps for k = 1..steps.
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Monte Carlo expected eccentricity for conjunction.
    Mc {
        #[arg(long, value_enum)]
        mode: McMode,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
