//! `pixvlc ber-curve`: analytic BER over an SNR grid, with optional
//! seeded Monte-Carlo columns.

use crate::output::{to_json, OutputOpts};
use crate::CliError;
use pixvlc_core::ber::{ber_analytic, estimate_ber_monte_carlo};
use pixvlc_core::snr::db_to_linear;
use serde::Serialize;
use std::fmt::Write;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// PAM order (power of two)
    #[arg(long)]
    pub order: u32,
    /// Grid start, dB
    #[arg(long)]
    pub snr_min: f64,
    /// Grid end, dB (inclusive)
    #[arg(long)]
    pub snr_max: f64,
    /// Grid step, dB
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    /// Add Monte-Carlo columns simulating this many symbols per grid point
    #[arg(long, value_name = "SYMBOLS")]
    pub monte_carlo: Option<u64>,
    /// Seed for the Monte-Carlo runs
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Serialize)]
struct Row {
    snr_db: f64,
    analytic_ber: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_ber: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci95: Option<f64>,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    if args.order < 2 || !args.order.is_power_of_two() {
        return Err(CliError::Usage(format!(
            "--order must be a power of two >= 2, got {}",
            args.order
        )));
    }
    if !(args.step > 0.0 && args.step.is_finite()) {
        return Err(CliError::Usage(format!(
            "--step must be positive, got {}",
            args.step
        )));
    }
    if args.snr_min > args.snr_max {
        return Err(CliError::Usage(format!(
            "--snr-min ({}) must not exceed --snr-max ({})",
            args.snr_min, args.snr_max
        )));
    }
    if args.monte_carlo == Some(0) {
        return Err(CliError::Usage(
            "--monte-carlo needs at least 1 symbol".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut i = 0u64;
    loop {
        let snr_db = args.snr_min + i as f64 * args.step;
        if snr_db > args.snr_max + 1e-9 {
            break;
        }
        let (mc_ber, ci95) = match args.monte_carlo {
            Some(n_symbols) => {
                let report = estimate_ber_monte_carlo(args.order, snr_db, n_symbols, args.seed);
                (report.ber_monte_carlo, Some(report.ci95_halfwidth))
            }
            None => (None, None),
        };
        rows.push(Row {
            snr_db,
            analytic_ber: ber_analytic(args.order, db_to_linear(snr_db)),
            mc_ber,
            ci95,
        });
        i += 1;
    }

    let content = match args.output.format {
        crate::output::Format::Json => to_json(&rows)?,
        crate::output::Format::Csv => {
            let with_mc = args.monte_carlo.is_some();
            let mut text = String::from(if with_mc {
                "snr_db,analytic_ber,mc_ber,ci95\n"
            } else {
                "snr_db,analytic_ber\n"
            });
            for r in &rows {
                if with_mc {
                    writeln!(
                        text,
                        "{},{:e},{:e},{:e}",
                        r.snr_db,
                        r.analytic_ber,
                        r.mc_ber.unwrap(),
                        r.ci95.unwrap()
                    )
                    .expect("string write");
                } else {
                    writeln!(text, "{},{:e}", r.snr_db, r.analytic_ber).expect("string write");
                }
            }
            text
        }
    };
    args.output.write(&content)
}
