//! End-to-end link simulation: bits → Gray PAM symbols → pixel states →
//! waveform → noisy channel → detection → bit comparison.
//!
//! A [`ScenarioConfig`] pins every degree of freedom including the RNG seed,
//! so a scenario is a pure function of its config: bit generation and channel
//! noise draw from separate derived streams, and sweep cells get seeds
//! derived from their grid position. Sweep cells are independent and run in
//! parallel with results identical to a sequential pass.

use crate::ber::ber_analytic;
use crate::channel::{ChannelError, ChannelModel};
use crate::modem::{detect, modulate, ModemError, ModulationScheme};
use crate::pixel_array::{PixelArray, PixelArrayError};
use crate::seed::{derive_seed, derive_seed2};
use crate::snr::db_to_linear;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use thiserror::Error;

/// Transmit amplitude applied by the channel; the detector is given the same
/// value as its reference (perfect channel-state knowledge).
const PEAK_AMPLITUDE: f64 = 1.0;

/// Errors from scenario validation and execution.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario config: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Modem(#[from] ModemError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    PixelArray(#[from] PixelArrayError),
}

/// Everything one simulated transmission depends on.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub array: PixelArray,
    pub scheme: ModulationScheme,
    pub channel: ChannelModel,
    pub distance_m: f64,
    pub n_bits: u64,
    pub seed: u64,
    pub samples_per_symbol: usize,
    /// Optional first-order LCD transition time constant, seconds.
    pub transition_tau_s: Option<f64>,
}

impl ScenarioConfig {
    /// Check every config invariant, reporting all violations at once.
    pub fn validate(&self) -> Result<(), SimError> {
        let mut violations = Vec::new();
        let order = self.scheme.order();
        let levels = self.array.levels_available();
        if levels < u64::from(order) {
            violations.push(format!("levels_available({levels}) < {order}"));
        }
        if self.n_bits == 0 {
            violations.push("n_bits must be positive".to_string());
        }
        let bits_per_symbol = u64::from(self.scheme.bits_per_symbol());
        if self.n_bits % bits_per_symbol != 0 {
            violations.push(format!(
                "n_bits ({}) is not a multiple of log2(M) = {bits_per_symbol}",
                self.n_bits
            ));
        }
        if self.samples_per_symbol == 0 {
            violations.push("samples_per_symbol must be at least 1".to_string());
        }
        if !(self.distance_m > 0.0 && self.distance_m.is_finite()) {
            violations.push(format!(
                "distance_m must be positive and finite, got {}",
                self.distance_m
            ));
        }
        if let Some(tau) = self.transition_tau_s {
            if !(tau > 0.0 && tau.is_finite()) {
                violations.push(format!(
                    "transition_tau_s must be positive and finite, got {tau}"
                ));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(SimError::Validation(violations))
        }
    }
}

/// Measured outcome of one simulated transmission.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    /// bit_errors / n_bits.
    pub measured_ber: f64,
    pub bit_errors: u64,
    /// symbol_rate × log2(M).
    pub throughput_bps: f64,
    /// SNR the channel applied at the configured distance.
    pub snr_db_used: f64,
    /// Analytic BER at the same SNR, for side-by-side comparison.
    pub analytic_ber: f64,
}

/// Run one scenario. Deterministic: the same config (including seed) yields
/// the same result bit for bit.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult, SimError> {
    cfg.validate()?;

    let mut bit_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0));
    let tx_bits: Vec<bool> = (0..cfg.n_bits).map(|_| bit_rng.random()).collect();

    let symbols = cfg.scheme.bits_to_symbols(&tx_bits)?;
    let waveform = modulate(
        &symbols,
        &cfg.array,
        &cfg.scheme,
        cfg.samples_per_symbol,
        cfg.transition_tau_s,
    )?;
    let received = cfg.channel.apply(
        &waveform,
        cfg.distance_m,
        PEAK_AMPLITUDE,
        derive_seed(cfg.seed, 1),
    )?;
    let detected = detect(
        &received.samples,
        &cfg.scheme,
        PEAK_AMPLITUDE,
        cfg.samples_per_symbol,
    )?;
    let rx_bits = cfg.scheme.symbols_to_bits(&detected)?;

    let bit_errors = tx_bits
        .iter()
        .zip(rx_bits.iter())
        .filter(|(a, b)| a != b)
        .count() as u64;

    Ok(ScenarioResult {
        measured_ber: bit_errors as f64 / cfg.n_bits as f64,
        bit_errors,
        throughput_bps: cfg.scheme.bits_per_second(),
        snr_db_used: received.snr_db,
        analytic_ber: ber_analytic(cfg.scheme.order(), db_to_linear(received.snr_db)),
    })
}

/// One cell of a distance × order sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub distance_m: f64,
    pub order: u32,
    /// Present when the cell ran; absent for infeasible configurations.
    pub result: Option<ScenarioResult>,
    /// The failure description for infeasible cells.
    pub error: Option<String>,
    /// Analytic BER exceeds 10× the sweep's target BER.
    pub above_target: bool,
}

/// Row-major (distance-major) sweep results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMatrix {
    pub distances: Vec<f64>,
    pub orders: Vec<u32>,
    pub target_ber: f64,
    pub cells: Vec<SweepCell>,
}

/// Run the cartesian product of `distances` × `orders` from a template
/// config. Cell (row, col) uses the seed derived from
/// (template.seed, row, col); infeasible cells are recorded, not fatal.
/// Cells execute in parallel; results are position-stable and identical to
/// a sequential run.
pub fn sweep(
    template: &ScenarioConfig,
    distances: &[f64],
    orders: &[u32],
    target_ber: f64,
) -> SweepMatrix {
    let cols = orders.len();
    let cells: Vec<SweepCell> = (0..distances.len() * cols)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / cols, idx % cols);
            run_cell(template, distances[row], orders[col], row, col, target_ber)
        })
        .collect();
    SweepMatrix {
        distances: distances.to_vec(),
        orders: orders.to_vec(),
        target_ber,
        cells,
    }
}

fn run_cell(
    template: &ScenarioConfig,
    distance_m: f64,
    order: u32,
    row: usize,
    col: usize,
    target_ber: f64,
) -> SweepCell {
    let scheme = match ModulationScheme::new(order, template.scheme.symbol_rate_hz()) {
        Ok(s) => s,
        Err(e) => {
            return SweepCell {
                distance_m,
                order,
                result: None,
                error: Some(e.to_string()),
                above_target: false,
            }
        }
    };
    let cfg = ScenarioConfig {
        scheme,
        distance_m,
        seed: derive_seed2(template.seed, row as u64, col as u64),
        ..template.clone()
    };
    match run_scenario(&cfg) {
        Ok(result) => {
            let above_target = result.analytic_ber > 10.0 * target_ber;
            SweepCell {
                distance_m,
                order,
                result: Some(result),
                error: None,
                above_target,
            }
        }
        Err(e) => SweepCell {
            distance_m,
            order,
            result: None,
            error: Some(e.to_string()),
            above_target: false,
        },
    }
}

/// Fixed CSV header for scenario and sweep rows.
pub const RESULT_CSV_HEADER: &str =
    "distance_m,order,snr_db,analytic_ber,measured_ber,bit_errors,throughput_bps,status";

/// Quote a CSV field if it contains a comma, quote, or newline.
fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn write_result_row<W: Write>(
    w: &mut W,
    distance_m: f64,
    order: u32,
    result: &ScenarioResult,
    status: &str,
) -> std::io::Result<()> {
    writeln!(
        w,
        "{},{},{},{:e},{:e},{},{},{}",
        distance_m,
        order,
        result.snr_db_used,
        result.analytic_ber,
        result.measured_ber,
        result.bit_errors,
        result.throughput_bps,
        csv_escape(status)
    )
}

impl ScenarioResult {
    /// Serialize this result as one CSV row under [`RESULT_CSV_HEADER`].
    pub fn write_csv<W: Write>(
        &self,
        w: &mut W,
        distance_m: f64,
        order: u32,
    ) -> std::io::Result<()> {
        writeln!(w, "{RESULT_CSV_HEADER}")?;
        write_result_row(w, distance_m, order, self, "ok")
    }
}

impl SweepMatrix {
    /// Serialize all cells as CSV, one row per cell under
    /// [`RESULT_CSV_HEADER`]; infeasible cells have empty numeric fields and
    /// an `error: …` status.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{RESULT_CSV_HEADER}")?;
        for cell in &self.cells {
            match (&cell.result, &cell.error) {
                (Some(result), _) => {
                    let status = if cell.above_target { "above_target" } else { "ok" };
                    write_result_row(w, cell.distance_m, cell.order, result, status)?;
                }
                (None, Some(error)) => writeln!(
                    w,
                    "{},{},,,,,,{}",
                    cell.distance_m,
                    cell.order,
                    csv_escape(&format!("error: {error}"))
                )?,
                (None, None) => unreachable!("cell carries either a result or an error"),
            }
        }
        Ok(())
    }
}
