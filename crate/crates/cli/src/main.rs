//! Command-line front end: scores cases, runs the evaluation protocols,
//! generates synthetic scenario files, and inspects utility caches.
//!
//! Exit codes: 0 on success, 1 when the oracle or an estimator fails at
//! runtime, 2 for usage and configuration problems (bad flags, missing
//! files, invalid case data).

mod commands;
mod config;

use clap::{Parser, Subcommand};
use ragshap::estimators::EstimatorError;
use ragshap::eval::EvalError;
use ragshap::oracle::OracleError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Failures carry their exit-code class.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable input, invalid configuration: exit 2.
    Usage(String),
    /// The run itself failed (endpoint down, estimation error): exit 1.
    Runtime(String),
}

impl CliError {
    pub fn usage(msg: impl std::fmt::Display) -> Self {
        CliError::Usage(msg.to_string())
    }

    pub fn runtime(msg: impl std::fmt::Display) -> Self {
        CliError::Runtime(msg.to_string())
    }
}

pub fn from_oracle(e: OracleError) -> CliError {
    match e {
        OracleError::Config(_) => CliError::usage(e),
        _ => CliError::runtime(e),
    }
}

pub fn from_estimator(e: EstimatorError) -> CliError {
    match e {
        EstimatorError::Config(_)
        | EstimatorError::BudgetTooSmall { .. }
        | EstimatorError::TooManyPlayers { .. } => CliError::usage(e),
        EstimatorError::Oracle(inner) => from_oracle(inner),
        _ => CliError::runtime(e),
    }
}

pub fn from_eval(e: EvalError) -> CliError {
    match e {
        EvalError::Input(_) | EvalError::TooManyPlayers { .. } | EvalError::Io { .. } => {
            CliError::usage(e)
        }
        EvalError::Estimator(inner) => from_estimator(inner),
        EvalError::Oracle(inner) => from_oracle(inner),
        _ => CliError::runtime(e),
    }
}

#[derive(Parser)]
#[command(
    name = "ragshap",
    version,
    about = "Per-document attribution for retrieval-augmented generation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Score one case and print ranked per-document attributions.
    Attribute(commands::AttributeArgs),
    /// Run an evaluation protocol over a case file and write CSV+JSON reports.
    Experiment(commands::ExperimentArgs),
    /// Generate a synthetic scenario case file (AB and BA order variants).
    GenSynthetic(commands::GenArgs),
    /// Inspect a utility cache file.
    Cache(CacheArgs),
}

#[derive(clap::Args)]
struct CacheArgs {
    #[command(subcommand)]
    action: CacheAction,
}

#[derive(Subcommand)]
enum CacheAction {
    /// Aggregate counts: records, per-case coverage, total tokens.
    Stats {
        /// Cache file (JSONL).
        path: PathBuf,
    },
    /// Per-(case, model) detail including value ranges.
    Inspect {
        /// Cache file (JSONL).
        path: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Attribute(args) => commands::attribute(&args),
        Cmd::Experiment(args) => commands::experiment(&args),
        Cmd::GenSynthetic(args) => commands::gen_synthetic(&args),
        Cmd::Cache(args) => match args.action {
            CacheAction::Stats { path } => commands::cache_summary(&path, false),
            CacheAction::Inspect { path } => commands::cache_summary(&path, true),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
