//! `gasball`: batch front-end for the equilibrium solver, the ensemble
//! sampler, the event-driven simulator and the acceptance suite.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{Overrides, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] gasball::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ValidationFailed,
    NotFloating,
}

impl Outcome {
    fn exit_code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::ValidationFailed => 3,
            Outcome::NotFloating => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gasball", version, about = "Ideal gas with a floating ball: solve, sample, simulate, validate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Floating height and inverse temperature; writes equilibrium.csv and psi_profile.csv.
    Solve(Flags),
    /// Thinned microcanonical states; writes states.csv and sample_diagnostics.csv.
    Sample(Flags),
    /// Event-driven run; writes summary.csv, histograms.csv and report.txt.
    Simulate(Flags),
    /// Runs the acceptance suite; writes validation.csv.
    Validate(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// `specular` or `lambertian`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    duration: Option<f64>,
    /// Number of gas particles.
    #[arg(long)]
    n: Option<usize>,
}

impl Flags {
    fn load(&self) -> Result<RunConfig, CliError> {
        let o = Overrides {
            seed: self.seed,
            out_dir: self.out_dir.clone(),
            mode: self.mode.clone(),
            duration: self.duration,
            n: self.n,
        };
        RunConfig::load(&self.config, &o)
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Solve(f) => commands::solve(&f.load()?),
        Command::Sample(f) => commands::sample(&f.load()?),
        Command::Simulate(f) => commands::simulate(&f.load()?),
        Command::Validate(f) => commands::validate(&f.load()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { CliError::Usage(String::new()).exit_code() } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("gasball: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
