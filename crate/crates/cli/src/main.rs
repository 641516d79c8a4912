//! `pixvlc` — link analysis and simulation for pixelated VLC backscatter.
//!
//! Every subcommand is deterministic given its flags (and seed, where one
//! applies): repeated runs produce byte-identical output. Exit codes are a
//! stable contract for scripting: 0 success, 1 usage/validation, 2 I/O or
//! file parse errors.

mod commands;
mod config;
mod output;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::fmt;
use std::process::ExitCode;

/// CLI failure classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, out-of-range values, failed validation — exit 1.
    Usage(String),
    /// Unreadable files, malformed CSV/JSON — exit 2.
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pixvlc",
    version,
    about = "Pixelated VLC backscatter link analysis and simulation",
    after_help = "Exit codes: 0 success, 1 usage/validation error, 2 I/O or parse error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Required SNR per PAM order at a target BER
    RequiredSnr(commands::required_snr::Args),
    /// Rate-adaptation table over distances from a calibration file
    Adapt(commands::adapt::Args),
    /// Analytic (and optionally Monte-Carlo) BER over an SNR grid
    BerCurve(commands::ber_curve::Args),
    /// Energy harvest/consumption budget and feasibility verdict
    Budget(commands::budget::Args),
    /// Run a scenario or sweep described by a JSON config file
    Simulate(commands::simulate::Args),
    /// Binary-weighted pixel sizing under a total-area constraint
    Pixels(commands::pixels::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not failures
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::RequiredSnr(args) => commands::required_snr::run(&args),
        Command::Adapt(args) => commands::adapt::run(&args),
        Command::BerCurve(args) => commands::ber_curve::run(&args),
        Command::Budget(args) => commands::budget::run(&args),
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Pixels(args) => commands::pixels::run(&args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
