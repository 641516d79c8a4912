//! `pixvlc budget`: harvest vs. consumption and the self-sustainability
//! verdict. The verdict is data, not an exit code — an infeasible budget
//! still exits 0.

use crate::output::{to_json, OutputOpts};
use crate::CliError;
use clap::ValueEnum;
use pixvlc_core::energy::{feasibility, ClockSource, ConsumptionModel, EnergyError, HarvestParams};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Clock {
    Dco,
    Vlo,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Ambient illuminance in lux
    #[arg(long, default_value_t = 200.0)]
    pub lux: f64,
    /// Solar cell area in cm²
    #[arg(long, default_value_t = 25.0)]
    pub area_cm2: f64,
    /// Solar cell efficiency in (0, 1]
    #[arg(long, default_value_t = 0.40)]
    pub efficiency: f64,
    /// Microcontroller clock source (selects the built-in current table)
    #[arg(long, value_enum, default_value_t = Clock::Vlo)]
    pub clock: Clock,
    /// Modulation frequency in Hz, within the current table's range
    #[arg(long, default_value_t = 100.0)]
    pub mod_freq: f64,
    /// Supply voltage in volts
    #[arg(long, default_value_t = 3.0)]
    pub supply_voltage: f64,
    /// Override the built-in current table with a CSV file
    /// (header frequency_hz,current_uA)
    #[arg(long, value_name = "FILE")]
    pub current_table: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let harvest = HarvestParams::new(args.lux, args.area_cm2, args.efficiency)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let clock_source = match args.clock {
        Clock::Dco => ClockSource::Dco,
        Clock::Vlo => ClockSource::Vlo,
    };
    let model = match &args.current_table {
        Some(path) => {
            ConsumptionModel::from_csv_path(clock_source, args.supply_voltage, path).map_err(
                |e| match e {
                    EnergyError::Csv { .. } | EnergyError::Io(_) => {
                        CliError::Io(format!("{}: {e}", path.display()))
                    }
                    other => CliError::Usage(other.to_string()),
                },
            )?
        }
        None => {
            let base = match args.clock {
                Clock::Dco => ConsumptionModel::dco_3v(),
                Clock::Vlo => ConsumptionModel::vlo_3v(),
            };
            if args.supply_voltage == 3.0 {
                base
            } else {
                ConsumptionModel::new(
                    clock_source,
                    args.supply_voltage,
                    base.current_table().to_vec(),
                    pixvlc_core::energy::LCD_POWER_UW_AT_200HZ,
                )
                .map_err(|e| CliError::Usage(e.to_string()))?
            }
        }
    };

    let budget = feasibility(&harvest, &model, args.mod_freq)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let content = match args.output.format {
        crate::output::Format::Json => to_json(&budget)?,
        crate::output::Format::Csv => format!(
            "harvested_uw,consumed_uw,margin_uw,feasible\n{},{},{},{}\n",
            budget.harvested_uw, budget.consumed_uw, budget.margin_uw, budget.feasible
        ),
    };
    args.output.write(&content)
}
