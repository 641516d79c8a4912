//! `pixvlc required-snr`: SNR threshold and throughput per PAM order.

use crate::output::{parse_list, to_json, OutputOpts};
use crate::CliError;
use pixvlc_core::ber::required_snr_db;
use serde::Serialize;
use std::fmt::Write;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Target bit-error rate
    #[arg(long, default_value_t = 1e-3)]
    pub target_ber: f64,
    /// Comma-separated PAM orders (powers of two)
    #[arg(long, default_value = "2,4,8")]
    pub orders: String,
    /// Symbol rate in Hz for the throughput column
    #[arg(long, default_value_t = 200.0)]
    pub symbol_rate: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Serialize)]
struct Row {
    order: u32,
    required_snr_db: f64,
    throughput_bps: f64,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let orders: Vec<u32> = parse_list(&args.orders, "--orders")?;
    if !(args.symbol_rate > 0.0 && args.symbol_rate.is_finite()) {
        return Err(CliError::Usage(format!(
            "--symbol-rate must be positive, got {}",
            args.symbol_rate
        )));
    }
    let mut rows = Vec::with_capacity(orders.len());
    for order in orders {
        if order < 2 || !order.is_power_of_two() {
            return Err(CliError::Usage(format!(
                "--orders entries must be powers of two >= 2, got {order}"
            )));
        }
        let snr = required_snr_db(order, args.target_ber)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        rows.push(Row {
            order,
            required_snr_db: snr,
            throughput_bps: args.symbol_rate * f64::from(order.trailing_zeros()),
        });
    }

    let content = match args.output.format {
        crate::output::Format::Json => to_json(&rows)?,
        crate::output::Format::Csv => {
            let mut text = String::from("order,required_snr_db,throughput_bps\n");
            for r in &rows {
                writeln!(text, "{},{},{}", r.order, r.required_snr_db, r.throughput_bps)
                    .expect("string write");
            }
            text
        }
    };
    args.output.write(&content)
}
