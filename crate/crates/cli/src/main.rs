//! Command-line interface for the checkerboard composite pipeline:
//! dataset generation, solver validation, surrogate training and scoring,
//! and genetic microstructure optimization.
//!
//! Exit codes: 0 success, 2 invalid command line, 3 invalid configuration,
//! 4 io failure, 5 numerical failure.

mod commands;
mod config;
mod error;
mod model_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "checkerboard",
    version,
    about = "FE-labeled datasets, surrogate models, and genetic optimization \
             for cracked checkerboard composites"
)]
struct Cli {
    /// TOML file supplying defaults for omitted options; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an FE-labeled dataset of random microstructures.
    GenData(commands::gen_data::GenDataArgs),
    /// Run the finite-element validation battery.
    ValidateFem(commands::validate_fem::ValidateFemArgs),
    /// Fit a linear or CNN surrogate on a labeled dataset.
    Train(commands::train::TrainArgs),
    /// Score a saved surrogate against labeled data.
    Eval(commands::eval::EvalArgs),
    /// Search microstructures with the genetic algorithm.
    Optimize(commands::optimize::OptimizeArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::GenData(args) => commands::gen_data::run(args, &config),
        Command::ValidateFem(args) => commands::validate_fem::run(args, &config),
        Command::Train(args) => commands::train::run(args, &config),
        Command::Eval(args) => commands::eval::run(args, &config),
        Command::Optimize(args) => commands::optimize::run(args, &config),
    }
}
