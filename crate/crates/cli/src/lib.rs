//! The `monoword` command line: tables along every route and the
//! cross-route validation report.

pub mod commands;
pub mod grid;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monoword::{Error, Which};

use crate::output::Format;

pub const THREADS_ENV: &str = "MONOWORD_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "monoword",
    version,
    about = "Distributions of monotone subsequence lengths in random words"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact F_I / F_D(n; k, N) by enumeration, tableaux or Toeplitz series.
    Dist(commands::dist::DistArgs),
    /// Run the cross-route checks and write a JSON report.
    Crosscheck(commands::crosscheck::CrosscheckArgs),
    /// e^{−kt}D_n(t) or σ(t) from the Painlevé V σ-form.
    Painleve(commands::painleve::PainleveArgs),
    /// Smallest-eigenvalue probabilities of the Laguerre ensemble.
    Laguerre(commands::laguerre::LaguerreArgs),
    /// Traceless GUE, Tracy–Widom and the large-N convergence tables.
    Limits(commands::limits::LimitsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichArg {
    #[value(name = "I")]
    I,
    #[value(name = "D")]
    D,
    Both,
}

impl WhichArg {
    pub fn kinds(self) -> Vec<Which> {
        match self {
            WhichArg::I => vec![Which::Increasing],
            WhichArg::D => vec![Which::Decreasing],
            WhichArg::Both => vec![Which::Increasing, Which::Decreasing],
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Validation(String),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) | Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Validation(m) => write!(f, "validation failure: {m}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::BudgetExceeded { .. }
            | Error::TruncationOrder { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

pub fn open_output(args: &OutputArgs) -> CliResult<Box<dyn Write>> {
    Ok(match &args.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Thread count from MONOWORD_THREADS, if set.
pub fn threads_from_env(value: Option<&str>) -> CliResult<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Dist(a) => commands::dist::run(&a),
        Command::Crosscheck(a) => commands::crosscheck::run(&a),
        Command::Painleve(a) => commands::painleve::run(&a),
        Command::Laguerre(a) => commands::laguerre::run(&a),
        Command::Limits(a) => commands::limits::run(&a),
    }
}
