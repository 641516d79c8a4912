//! `pixvlc adapt`: per-distance modulation choice from a calibration file.

use crate::output::{parse_list, to_json, OutputOpts};
use crate::CliError;
use pixvlc_core::channel::{ChannelError, ChannelModel};
use pixvlc_core::link_adapt::{adaptation_table, AdaptationPolicy};
use std::fmt::Write;
use std::path::PathBuf;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Calibration CSV with header distance_m,snr_db
    #[arg(long, value_name = "FILE")]
    pub calibration: PathBuf,
    /// Comma-separated distances in metres
    #[arg(long)]
    pub distances: String,
    /// Target bit-error rate
    #[arg(long, default_value_t = 1e-3)]
    pub target_ber: f64,
    /// Comma-separated allowed PAM orders, ascending
    #[arg(long, default_value = "2,4,8")]
    pub orders: String,
    /// Symbol rate in Hz
    #[arg(long, default_value_t = 200.0)]
    pub symbol_rate: f64,
    /// Evaluate through a least-squares power-law fit of the calibration
    /// instead of table interpolation (enables extrapolation); the fit and
    /// its residuals are printed to standard error
    #[arg(long)]
    pub power_law: bool,
    #[command(flatten)]
    pub output: OutputOpts,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let distances: Vec<f64> = parse_list(&args.distances, "--distances")?;
    let orders: Vec<u32> = parse_list(&args.orders, "--orders")?;
    let policy = AdaptationPolicy::new(orders, args.target_ber, args.symbol_rate)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let calibration = ChannelModel::table_from_csv_path(&args.calibration).map_err(|e| {
        CliError::Io(format!("{}: {e}", args.calibration.display()))
    })?;

    let model = if args.power_law {
        let (model, fit) = ChannelModel::fitted_power_law(calibration.calibration().to_vec())
            .map_err(|e| CliError::Usage(format!("power-law fit: {e}")))?;
        eprintln!("# power-law fit: c0_db={} gamma={}", fit.c0_db, fit.gamma);
        for (point, residual) in calibration.calibration().iter().zip(&fit.residuals_db) {
            eprintln!("# residual at {} m: {residual} dB", point.0);
        }
        model
    } else {
        calibration
    };

    let decisions = adaptation_table(&model, &distances, &policy).map_err(|e| match e {
        ChannelError::OutOfCalibratedRange { .. } => CliError::Usage(format!(
            "{e} (pass --power-law to evaluate beyond the calibration)"
        )),
        other => CliError::Usage(other.to_string()),
    })?;

    let content = match args.output.format {
        crate::output::Format::Json => to_json(&decisions)?,
        crate::output::Format::Csv => {
            let mut text = String::from("distance_m,snr_db,chosen_order,throughput_bps,margin_db\n");
            for d in &decisions {
                let order = d
                    .chosen_order
                    .map(|m| m.to_string())
                    .unwrap_or_default();
                writeln!(
                    text,
                    "{},{},{},{},{}",
                    d.distance_m.expect("table decisions carry a distance"),
                    d.snr_db,
                    order,
                    d.throughput_bps,
                    d.margin_db
                )
                .expect("string write");
            }
            text
        }
    };
    args.output.write(&content)
}
