//! Command-line front end for the Bell-Touchard counting-process toolkit:
//! tabulate the law, simulate paths, estimate ruin, and run the validation
//! battery.
//!
//! Exit codes: 0 success, 1 numeric or runtime failure (including failed
//! validation scenarios), 2 usage error (bad flags, bad parameter domains,
//! malformed config files).

mod config;
mod output;
mod pmf;
mod risk;
mod simulate;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// The invocation itself is wrong: exit 2.
    Usage(String),
    /// The run failed: exit 1.
    Failure(String),
}

impl From<belltouchard::Error> for CliError {
    fn from(err: belltouchard::Error) -> Self {
        match err {
            // Domain violations are bad inputs, so they count as usage.
            belltouchard::Error::Domain(msg) => CliError::Usage(msg),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Failure(err.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn resolve(flag: Option<Format>, ctx: &config::Context) -> Result<Format, CliError> {
        match flag {
            Some(f) => Ok(f),
            None => match ctx.file.str("format")? {
                Some("csv") => Ok(Format::Csv),
                Some("json") => Ok(Format::Json),
                Some(other) => Err(CliError::Usage(format!(
                    "unknown format {other:?}; expected csv or json"
                ))),
                None => Ok(Format::Csv),
            },
        }
    }
}

#[derive(Parser)]
#[command(
    name = "belltouchard",
    version,
    about = "Simulation and evaluation toolkit for the Bell-Touchard counting process",
    propagate_version = true
)]
struct Cli {
    /// Master seed for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for batch simulation (0 = runtime default). Results
    /// never depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Flat TOML file whose keys mirror long flag names; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the counting law as (k, pmf, cdf) rows.
    Pmf(pmf::PmfArgs),
    /// Simulate event paths and batch summaries.
    Simulate(simulate::SimulateArgs),
    /// Estimate ruin probability for the surplus process.
    Risk(risk::RiskArgs),
    /// Run the distributional validation battery.
    Validate(validate::ValidateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let ctx = config::Context::build(cli.seed, cli.workers, cli.config.as_deref(), cli.output)?;
    if ctx.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.workers)
            .build_global()
            .map_err(|e| CliError::Failure(format!("cannot size worker pool: {e}")))?;
    }
    match cli.command {
        Command::Pmf(args) => pmf::run(args, &ctx)?,
        Command::Simulate(args) => simulate::run(args, &ctx)?,
        Command::Risk(args) => risk::run(args, &ctx)?,
        Command::Validate(args) => return validate::run(args, &ctx),
    }
    Ok(ExitCode::SUCCESS)
}
