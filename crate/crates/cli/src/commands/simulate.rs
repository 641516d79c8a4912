//! `pixvlc simulate`: run the scenario or sweep described by a JSON config.
//!
//! Completion exits 0 even when the simulated link is infeasible — the
//! verdict is data. Only config problems (exit 1) and file errors (exit 2)
//! fail the command.

use crate::config::SimulateFile;
use crate::output::{to_json, OutputOpts};
use crate::CliError;
use pixvlc_core::sim_pipeline::{run_scenario, sweep, SimError};
use std::path::{Path, PathBuf};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Scenario configuration (JSON)
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let file = SimulateFile::load(&args.config)?;
    let config_dir = args
        .config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let (cfg, sweep_spec) = file.build(config_dir)?;

    let content = match sweep_spec {
        Some(spec) => {
            let matrix = sweep(&cfg, &spec.distances, &spec.orders, spec.target_ber);
            match args.output.format {
                crate::output::Format::Json => to_json(&matrix)?,
                crate::output::Format::Csv => {
                    let mut buf = Vec::new();
                    matrix.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("CSV output is UTF-8")
                }
            }
        }
        None => {
            let result = run_scenario(&cfg).map_err(|e| match e {
                SimError::Validation(_) => CliError::Usage(e.to_string()),
                other => CliError::Usage(other.to_string()),
            })?;
            match args.output.format {
                crate::output::Format::Json => to_json(&result)?,
                crate::output::Format::Csv => {
                    let mut buf = Vec::new();
                    result.write_csv(&mut buf, cfg.distance_m, cfg.scheme.order())?;
                    String::from_utf8(buf).expect("CSV output is UTF-8")
                }
            }
        }
    };
    args.output.write(&content)
}
