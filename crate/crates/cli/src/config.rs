//! JSON scenario configuration for `pixvlc simulate`.
//!
//! The schema is versioned (`schema_version`, currently 1) and strict:
//! unknown fields are rejected so a typo cannot silently fall back to a
//! default. Relative paths inside the config (the calibration CSV) resolve
//! against the config file's own directory.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "array": { "structure": "binary_weighted", "clusters": 3, "total_diameter_mm": 20.0 },
//!   "modulation": { "order": 8, "symbol_rate_hz": 200.0 },
//!   "channel": { "calibration_csv": "table3_distance_snr.csv" },
//!   "distance_m": 2.0,
//!   "n_bits": 120000,
//!   "seed": 7,
//!   "samples_per_symbol": 10,
//!   "transition_tau_s": null,
//!   "sweep": { "distances": [2, 3, 4, 5], "orders": [2, 4, 8], "target_ber": 1e-3 }
//! }
//! ```
//!
//! `channel` takes exactly one of `calibration_csv`, inline `calibration`
//! pairs, or `power_law` parameters. `sweep` is optional; without it the
//! command runs the single configured scenario.

use crate::CliError;
use pixvlc_core::channel::ChannelModel;
use pixvlc_core::modem::ModulationScheme;
use pixvlc_core::pixel_array::PixelArray;
use pixvlc_core::sim_pipeline::ScenarioConfig;
use serde::Deserialize;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub schema_version: u32,
    pub array: ArraySpec,
    pub modulation: ModulationSpec,
    pub channel: ChannelSpec,
    pub distance_m: f64,
    pub n_bits: u64,
    pub seed: u64,
    #[serde(default = "default_samples_per_symbol")]
    pub samples_per_symbol: usize,
    #[serde(default)]
    pub transition_tau_s: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_samples_per_symbol() -> usize {
    pixvlc_core::modem::DEFAULT_SAMPLES_PER_SYMBOL
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySpec {
    /// "uniform" or "binary_weighted"
    pub structure: String,
    #[serde(default)]
    pub count: Option<u32>,
    #[serde(default)]
    pub clusters: Option<u32>,
    pub total_diameter_mm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSpec {
    pub order: u32,
    #[serde(default = "default_symbol_rate")]
    pub symbol_rate_hz: f64,
}

fn default_symbol_rate() -> f64 {
    pixvlc_core::modem::DEFAULT_SYMBOL_RATE_HZ
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default)]
    pub calibration_csv: Option<String>,
    #[serde(default)]
    pub calibration: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub power_law: Option<PowerLawSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawSpec {
    pub c0_db: f64,
    pub gamma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub distances: Vec<f64>,
    pub orders: Vec<u32>,
    #[serde(default = "default_target_ber")]
    pub target_ber: f64,
}

fn default_target_ber() -> f64 {
    1e-3
}

impl SimulateFile {
    /// Read and parse a config file. Unreadable files and broken JSON are
    /// I/O-class errors (exit 2); schema violations in well-formed JSON
    /// (unknown or missing fields, wrong types) are validation errors
    /// (exit 1), as are the semantic violations reported by [`Self::build`].
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("failed to read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            let message = format!("invalid config {}: {e}", path.display());
            if e.classify() == serde_json::error::Category::Data {
                CliError::Usage(message)
            } else {
                CliError::Io(message)
            }
        })
    }

    /// Turn the parsed file into core types, collecting every semantic
    /// violation instead of stopping at the first.
    pub fn build(&self, config_dir: &Path) -> Result<(ScenarioConfig, Option<&SweepSpec>), CliError> {
        let mut violations: Vec<String> = Vec::new();

        if self.schema_version != SCHEMA_VERSION {
            violations.push(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }

        let array = self.build_array(&mut violations);
        let scheme = match ModulationScheme::new(self.modulation.order, self.modulation.symbol_rate_hz)
        {
            Ok(s) => Some(s),
            Err(e) => {
                violations.push(format!("modulation: {e}"));
                None
            }
        };
        let channel = self.build_channel(config_dir, &mut violations)?;

        if let Some(sweep) = &self.sweep {
            if sweep.orders.iter().any(|&m| m < 2 || !m.is_power_of_two()) {
                violations.push(format!(
                    "sweep.orders must be powers of two >= 2, got {:?}",
                    sweep.orders
                ));
            }
            if !(sweep.target_ber > 0.0 && sweep.target_ber < 0.5) {
                violations.push(format!(
                    "sweep.target_ber must be inside (0, 0.5), got {}",
                    sweep.target_ber
                ));
            }
        }

        let (Some(array), Some(scheme), Some(channel)) = (array, scheme, channel) else {
            return Err(CliError::Usage(format!(
                "invalid config: {}",
                violations.join("; ")
            )));
        };

        let cfg = ScenarioConfig {
            array,
            scheme,
            channel,
            distance_m: self.distance_m,
            n_bits: self.n_bits,
            seed: self.seed,
            samples_per_symbol: self.samples_per_symbol,
            transition_tau_s: self.transition_tau_s,
        };
        // surface the scenario-level violations (level count, framing, ...)
        // together with anything collected above
        if let Err(e) = cfg.validate() {
            violations.push(e.to_string().replace("invalid scenario config: ", ""));
        }
        if !violations.is_empty() {
            return Err(CliError::Usage(format!(
                "invalid config: {}",
                violations.join("; ")
            )));
        }
        Ok((cfg, self.sweep.as_ref()))
    }

    fn build_array(&self, violations: &mut Vec<String>) -> Option<PixelArray> {
        let spec = &self.array;
        let built = match spec.structure.as_str() {
            "uniform" => {
                if spec.clusters.is_some() {
                    violations.push("array: 'clusters' is not valid for a uniform array".into());
                }
                match spec.count {
                    Some(count) => PixelArray::uniform(count, spec.total_diameter_mm)
                        .map_err(|e| format!("array: {e}")),
                    None => Err("array: uniform structure requires 'count'".into()),
                }
            }
            "binary_weighted" => {
                if spec.count.is_some() {
                    violations
                        .push("array: 'count' is not valid for a binary_weighted array".into());
                }
                match spec.clusters {
                    Some(clusters) => PixelArray::binary_weighted(clusters, spec.total_diameter_mm)
                        .map_err(|e| format!("array: {e}")),
                    None => Err("array: binary_weighted structure requires 'clusters'".into()),
                }
            }
            other => Err(format!(
                "array: unknown structure '{other}' (expected 'uniform' or 'binary_weighted')"
            )),
        };
        match built {
            Ok(array) => Some(array),
            Err(msg) => {
                violations.push(msg);
                None
            }
        }
    }

    fn build_channel(
        &self,
        config_dir: &Path,
        violations: &mut Vec<String>,
    ) -> Result<Option<ChannelModel>, CliError> {
        let spec = &self.channel;
        let sources = usize::from(spec.calibration_csv.is_some())
            + usize::from(spec.calibration.is_some())
            + usize::from(spec.power_law.is_some());
        if sources != 1 {
            violations.push(
                "channel: exactly one of 'calibration_csv', 'calibration', or 'power_law' \
                 must be given"
                    .into(),
            );
            return Ok(None);
        }
        if let Some(rel) = &spec.calibration_csv {
            let path = config_dir.join(rel);
            return match ChannelModel::table_from_csv_path(&path) {
                Ok(model) => Ok(Some(model)),
                // unreadable/malformed calibration is an I/O-class failure
                Err(e) => Err(CliError::Io(format!(
                    "channel calibration {}: {e}",
                    path.display()
                ))),
            };
        }
        if let Some(points) = &spec.calibration {
            return match ChannelModel::from_table(points.clone()) {
                Ok(model) => Ok(Some(model)),
                Err(e) => {
                    violations.push(format!("channel: {e}"));
                    Ok(None)
                }
            };
        }
        let pl = spec.power_law.as_ref().expect("source count checked");
        match ChannelModel::power_law(pl.c0_db, pl.gamma) {
            Ok(model) => Ok(Some(model)),
            Err(e) => {
                violations.push(format!("channel: {e}"));
                Ok(None)
            }
        }
    }
}
