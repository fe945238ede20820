//! `nsroot` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

pub mod commands;
pub mod format;
pub mod report;
pub mod settings;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nsroot",
    version,
    about = "High-precision scalar root finding with nonstationary methods"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one method and print its iteration trace.
    Solve(SolveArgs),
    /// Run several methods on the same problem side by side.
    Compare(CompareArgs),
    /// Tabulate orders of the stationary processes with memory and their
    /// efficiency indices.
    Analyze(AnalyzeArgs),
    /// Rerun the reference benchmark and check it against the published
    /// values.
    #[command(name = "reproduce-table1")]
    ReproduceTable1(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// f(x), e.g. "x^2 - exp((1/x) * sin(pi * x^2 / 2)) - 1".
    #[arg(long)]
    pub function: Option<String>,
    /// Comma-separated starting points, oldest first.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    /// Working precision in significant decimal digits.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Step and residual tolerance [default: 1e-(precision-20)].
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Known root, enables the error column.
    #[arg(long, allow_hyphen_values = true)]
    pub root_hint: Option<String>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// `key = value` file supplying any option not given as a flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Comma-separated method names [default: all].
    #[arg(long)]
    pub methods: Option<String>,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Derivatives per step, counting f itself.
    #[arg(long)]
    pub s: Option<u32>,
    /// Largest memory depth tabulated.
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => commands::solve(args, out),
        Command::Compare(args) => commands::compare(args, out),
        Command::Analyze(args) => commands::analyze(args, out),
        Command::ReproduceTable1(args) => commands::reproduce_table1(args, out),
    }
}
