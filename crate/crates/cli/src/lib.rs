//! Command-line front end: one verb per process, one JSON document out.

pub mod spec;
pub mod suite;
mod trace;
mod verbs;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "pca-cli/1";
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "pca", version, about = "Computability in partial combinatory algebras")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub verb: Verb,
}

/// Settings shared by every verb.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Step budget for each evaluation.
    #[arg(long, global = true, env = "PCA_FUEL", default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
    pub fuel: u64,
    /// Seed for every randomized probe sequence.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Stream intermediate events as JSON lines to this file.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Evaluate a closed term.
    Eval(EvalArgs),
    /// Compile a term to s/k form.
    Compile(CompileArgs),
    /// Kleene's first model.
    #[command(subcommand)]
    K1(K1Verb),
    /// Kleene's second model at desk scale.
    #[command(subcommand)]
    K2(K2Verb),
    /// The Friedberg numbering.
    #[command(subcommand)]
    Friedberg(FriedbergVerb),
    /// Relative computation against a table oracle.
    #[command(subcommand)]
    Oracle(OracleVerb),
    /// Extract a counterexample from a candidate.
    #[command(subcommand)]
    Refute(RefuteVerb),
    /// Exhaustively search for pcas of a given finite size.
    SearchFinitePca {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Run the acceptance battery.
    Suite {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Term as an s-expression, or @file.
    pub term: String,
    /// `k1`, `k2`, `oracle:<oracle>`, or the path of a finite table.
    #[arg(long, default_value = "k1")]
    pub model: String,
    /// Name a constant: `name=spec`.
    #[arg(long = "bind", value_name = "NAME=SPEC")]
    pub binds: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    pub term: String,
    /// Abstract this variable: compile `λ*x.term`.
    #[arg(long)]
    pub var: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum K1Verb {
    /// Run a program code on an input.
    Run { code: String, input: String },
}

#[derive(Debug, Subcommand)]
pub enum K2Verb {
    /// Compute output coordinates of `alpha · beta`.
    Apply {
        alpha: String,
        beta: String,
        #[arg(long, default_value_t = 16)]
        coords: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum FriedbergVerb {
    /// Advance the construction and summarize it.
    Run {
        #[command(flatten)]
        stages: StagesArg,
        /// Also save a snapshot of the construction here.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Check invariants of a saved snapshot, or of a fresh run.
    Check {
        snapshot: Option<PathBuf>,
        #[command(flatten)]
        stages: StagesArg,
    },
    /// Locate the code of `a ↦ 2a+1` and verify the k-law on samples.
    FindK {
        #[command(flatten)]
        stages: StagesArg,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Refute a claimed `s` element.
    RefuteS {
        /// The claimed code.
        #[arg(long)]
        code: String,
        /// Stage horizon at which the numbering is read.
        #[arg(long, default_value_t = 2_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct StagesArg {
    #[arg(long, default_value_t = 2_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub stages: u64,
}

#[derive(Debug, Subcommand)]
pub enum OracleVerb {
    /// Apply a machine to an input by dialogue.
    Run {
        /// K1 element spec; `plan:<name>` names a scripted machine.
        machine: String,
        input: String,
        /// `successor`, `constant-7`, `swap-k-s`, or @file.
        #[arg(long, default_value = "successor")]
        oracle: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum RefuteVerb {
    /// A claimed total decider of the halting set.
    Halting(CandidateArgs),
    /// A claimed 0̄/1̄ separator.
    Separator(CandidateArgs),
    /// A claimed total extension of the diagonal.
    Extension {
        #[command(flatten)]
        candidate: CandidateArgs,
        /// The separator used by the reduction.
        #[arg(long)]
        c01: Option<String>,
    },
    /// A claimed totalizer for a 1-1 precomplete numbering.
    Precomplete {
        /// Defaults to the K1 totalizer.
        candidate: Option<String>,
        #[arg(long, value_enum, default_value_t = Kernel::Identity)]
        kernel: Kernel,
    },
}

#[derive(Debug, Args)]
pub struct CandidateArgs {
    /// K1 element spec of the candidate.
    #[arg(required_unless_present = "family")]
    pub candidate: Option<String>,
    /// Run the shipped candidate family instead.
    #[arg(long, conflicts_with = "candidate")]
    pub family: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    Identity,
    FunctionEquality,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

/// Whether the verb achieved its purpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Serialize)]
pub struct Document {
    pub schema: &'static str,
    pub verb: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fuel_spent: Option<u64>,
    pub result: Value,
}

impl Document {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Failed => 1,
        }
    }
}

pub(crate) struct VerbOutput {
    pub status: Status,
    pub fuel_spent: Option<u64>,
    pub result: Value,
}

/// Runs one verb; usage and I/O errors produce no document.
pub fn dispatch(cli: &Cli) -> Result<Document, CliError> {
    let mut tracer = trace::Tracer::open(cli.config.trace.as_deref())?;
    let (verb, out) = verbs::run(&cli.verb, &cli.config, &mut tracer)?;
    tracer.finish()?;
    Ok(Document { schema: SCHEMA_VERSION, verb, status: out.status, fuel_spent: out.fuel_spent, result: out.result })
}

/// Serializes a document the way the binary prints it.
pub fn render(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
