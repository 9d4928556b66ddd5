//! `otto`: command-line front end for the relotto toolkit.
//!
//! Every subcommand reads flags and an optional `--config` JSON file (flags
//! win), and echoes the merged configuration into its output so a run can
//! be repeated by feeding the output back as `--config`.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod config;
mod emit;

use args::{Cli, Command};

/// Non-engine cycle: results are still printed.
const EXIT_NOT_ENGINE: u8 = 2;
const EXIT_INPUT: u8 = 1;
const EXIT_CHECKS_FAILED: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag, config key or value.
    Input(String),
    /// Numerical or I/O failure on valid input.
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<relotto::Error> for CliError {
    fn from(e: relotto::Error) -> Self {
        match &e {
            relotto::Error::Domain { name, .. } => {
                CliError::Input(format!("--{}: {e}", flag_name(name)))
            }
            relotto::Error::StepUnderflow { .. }
            | relotto::Error::TooManySteps { .. }
            | relotto::Error::StrokeMismatch { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Maps a library quantity name onto the flag that supplies it.
fn flag_name(quantity: &str) -> String {
    match quantity {
        "omega_start" => "omega-c".into(),
        "omega_end" => "omega-h".into(),
        other => other.replace('_', "-"),
    }
}

/// Outcome of a subcommand that ran to completion.
pub enum Status {
    Ok,
    NotEngine,
    ChecksFailed(Vec<String>),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let text = e.to_string();
                    eprintln!(
                        "{}",
                        text.lines().next().unwrap_or("error: invalid arguments")
                    );
                    ExitCode::from(EXIT_INPUT)
                }
            };
        }
    };
    let threads = match commands::threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let result = match cli.command {
        Command::Cycle(a) => commands::cycle(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Lambda(a) => commands::lambda(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Scatter(a) => commands::scatter(a, threads),
        Command::Hist(a) => commands::hist(a, threads),
        Command::Optimize(a) => commands::optimize(a),
        Command::Verify(a) => commands::verify(a, threads),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotEngine) => ExitCode::from(EXIT_NOT_ENGINE),
        Ok(Status::ChecksFailed(names)) => {
            eprintln!("failed checks: {}", names.join(", "));
            ExitCode::from(EXIT_CHECKS_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
