//! Reflection tables, energy curves and the numerical acceptance report.
//!
//! Exit codes: 0 success, 1 numeric or IO failure, 2 bad configuration, 3 failed verification.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{CommonArgs, GammaGridArgs, LGridArgs};

pub const VERSION: &str = env!("HALFSPACE_CASIMIR_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        source: halfspace_casimir::Error,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} of the acceptance checks failed")]
    VerificationFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric { .. } | CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::VerificationFailed(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "halfspace-casimir", version = VERSION, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reflection-factor components on a log-spaced momentum grid.
    Reflection {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        mass: Option<f64>,
        /// Absolute values of every component.
        #[arg(long)]
        magnitude: bool,
        #[command(flatten)]
        grid: GammaGridArgs,
    },
    /// Vacuum energy and its ratio to the Dirichlet energy for one or more mu = m/lambda.
    Energy {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated list.
        #[arg(long, value_delimiter = ',')]
        mu: Option<Vec<f64>>,
        #[command(flatten)]
        grid: LGridArgs,
    },
    /// Run every acceptance check and report measured against target values.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Reflection { common, mass, magnitude, grid } => {
            commands::reflection(&config::ReflectionConfig::resolve(&common, mass, magnitude, &grid)?)
        }
        Command::Energy { common, mu, grid } => commands::energy(&config::EnergyConfig::resolve(&common, mu, &grid)?),
        Command::Verify { common, mc_samples, seed } => {
            commands::verify(&config::VerifyRunConfig::resolve(&common, mc_samples, seed)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
