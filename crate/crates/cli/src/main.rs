//! `laws-vqa`: runs the optimizer experiments and writes plot-ready CSV.
//!
//! Exit codes: 0 success, 1 numeric abort (partial trace written),
//! 2 configuration error, 3 I/O error.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use laws_vqa::experiments::ExperimentKind;

use crate::config::{resolve, CompareArgs, ConfigArgs, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "laws-vqa", version, about = "Warm-start natural-gradient optimizers for variational quantum algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment with one optimizer and seed.
    Run(ConfigArgs),
    /// Run every (optimizer, seed) cell and write a summary table.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        compare: CompareArgs,
    },
    /// Resolve the configuration, print it, and exit.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        compare: CompareArgs,
    },
    /// Gradient-variance scan over register sizes.
    BpScan(ConfigArgs),
}

fn threads_from_env() -> Result<(), CliError> {
    let Ok(v) = std::env::var("LAWS_VQA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("LAWS_VQA_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

fn print_config(cfg: &RunConfig) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(cfg).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    threads_from_env()?;
    match cli.command {
        Command::Run(args) => {
            let cfg = resolve(&args, None)?;
            if args.validate {
                return print_config(&cfg);
            }
            commands::run(&cfg)
        }
        Command::Compare { config, compare } => {
            let cfg = resolve(&config, Some(&compare))?;
            if config.validate {
                return print_config(&cfg);
            }
            commands::compare(&cfg, compare.sweep_eta)
        }
        Command::Validate { config, compare } => print_config(&resolve(&config, Some(&compare))?),
        Command::BpScan(mut args) => {
            args.experiment = Some(ExperimentKind::BpScan.as_str().to_string());
            let cfg = resolve(&args, None)?;
            if args.validate {
                return print_config(&cfg);
            }
            commands::bp_scan(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("laws-vqa: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
