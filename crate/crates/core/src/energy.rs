//! Energy harvest/consumption budget.
//!
//! The device is meant to run entirely off a small indoor solar cell. The
//! harvest side converts illuminance to electrical power through
//! P = E_lux · I · A · E_solar; the consumption side is dominated by the
//! microcontroller, whose measured current draw depends on the selected
//! clock source, plus a sub-microwatt LCD switching term. A link is
//! self-sustaining when harvest covers consumption (boundary inclusive).

use serde::Serialize;
use std::io::Read;
use std::path::Path;
use thiserror::Error;

/// Conversion from illuminance to optical power density for typical indoor
/// white light, in W/cm² per lux.
pub const LUX_TO_FLUX_W_PER_CM2_PER_LUX: f64 = 1.46e-7;

/// Frequency at which the LCD power bound is specified.
pub const LCD_REFERENCE_FREQUENCY_HZ: f64 = 200.0;

/// Upper bound on LCD shutter drive power at 200 Hz, in µW.
pub const LCD_POWER_UW_AT_200HZ: f64 = 0.2;

/// Header required of current-table CSV files.
pub const CURRENT_CSV_HEADER: &str = "frequency_hz,current_uA";

/// Errors from budget construction and evaluation.
#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("illuminance must be non-negative and finite, got {0}")]
    InvalidIlluminance(f64),
    #[error("solar cell area must be positive and finite, got {0}")]
    InvalidArea(f64),
    #[error("solar efficiency must be in (0, 1], got {0}")]
    InvalidEfficiency(f64),
    #[error("lux-to-flux constant must be positive and finite, got {0}")]
    InvalidLuxToFlux(f64),
    #[error("supply voltage must be positive and finite, got {0}")]
    InvalidVoltage(f64),
    #[error("current table must not be empty")]
    EmptyCurrentTable,
    #[error("current table frequencies must be strictly increasing (row {index})")]
    NonIncreasingFrequency { index: usize },
    #[error("current table row {index}: current must be positive and finite, got {current_ua}")]
    InvalidCurrent { index: usize, current_ua: f64 },
    #[error("current table row {index}: frequency must be positive and finite, got {frequency_hz}")]
    InvalidFrequency { index: usize, frequency_hz: f64 },
    #[error("LCD power bound must be non-negative and finite, got {0}")]
    InvalidLcdPower(f64),
    #[error("modulation frequency {frequency_hz} Hz outside the measured range [{min_hz}, {max_hz}] Hz")]
    FrequencyOutOfRange {
        frequency_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },
    #[error("CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("failed to read current table file: {0}")]
    Io(#[from] std::io::Error),
}

/// Solar-harvest operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarvestParams {
    pub illuminance_lux: f64,
    pub solar_area_cm2: f64,
    pub solar_efficiency: f64,
    pub lux_to_flux_w_per_cm2_per_lux: f64,
}

impl HarvestParams {
    pub fn new(
        illuminance_lux: f64,
        solar_area_cm2: f64,
        solar_efficiency: f64,
    ) -> Result<Self, EnergyError> {
        Self::with_lux_to_flux(
            illuminance_lux,
            solar_area_cm2,
            solar_efficiency,
            LUX_TO_FLUX_W_PER_CM2_PER_LUX,
        )
    }

    pub fn with_lux_to_flux(
        illuminance_lux: f64,
        solar_area_cm2: f64,
        solar_efficiency: f64,
        lux_to_flux: f64,
    ) -> Result<Self, EnergyError> {
        if !(illuminance_lux >= 0.0 && illuminance_lux.is_finite()) {
            return Err(EnergyError::InvalidIlluminance(illuminance_lux));
        }
        if !(solar_area_cm2 > 0.0 && solar_area_cm2.is_finite()) {
            return Err(EnergyError::InvalidArea(solar_area_cm2));
        }
        if !(solar_efficiency > 0.0 && solar_efficiency <= 1.0) {
            return Err(EnergyError::InvalidEfficiency(solar_efficiency));
        }
        if !(lux_to_flux > 0.0 && lux_to_flux.is_finite()) {
            return Err(EnergyError::InvalidLuxToFlux(lux_to_flux));
        }
        Ok(Self {
            illuminance_lux,
            solar_area_cm2,
            solar_efficiency,
            lux_to_flux_w_per_cm2_per_lux: lux_to_flux,
        })
    }

    /// Dim indoor lighting (200 lux) on a 25 cm² cell at 40% efficiency —
    /// the reference self-charging operating point.
    pub fn indoor_reference() -> Self {
        Self::new(200.0, 25.0, 0.40).expect("reference parameters are valid")
    }
}

/// Microcontroller clock source driving the consumption profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClockSource {
    /// Digitally controlled oscillator, ~1 MHz: fast but ~1 mW at 3 V.
    Dco,
    /// Very-low-power oscillator, ~12 kHz: ample for a 200 Hz shutter and
    /// roughly 200 µW at 3 V.
    Vlo,
}

/// Measured consumption model: supply voltage, current vs. modulation
/// frequency, and the LCD drive bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsumptionModel {
    clock_source: ClockSource,
    supply_voltage_v: f64,
    current_table: Vec<(f64, f64)>,
    lcd_power_uw_at_200hz: f64,
}

impl ConsumptionModel {
    pub fn new(
        clock_source: ClockSource,
        supply_voltage_v: f64,
        current_table: Vec<(f64, f64)>,
        lcd_power_uw_at_200hz: f64,
    ) -> Result<Self, EnergyError> {
        if !(supply_voltage_v > 0.0 && supply_voltage_v.is_finite()) {
            return Err(EnergyError::InvalidVoltage(supply_voltage_v));
        }
        if current_table.is_empty() {
            return Err(EnergyError::EmptyCurrentTable);
        }
        for (i, &(f, ua)) in current_table.iter().enumerate() {
            if !(f > 0.0 && f.is_finite()) {
                return Err(EnergyError::InvalidFrequency {
                    index: i,
                    frequency_hz: f,
                });
            }
            if !(ua > 0.0 && ua.is_finite()) {
                return Err(EnergyError::InvalidCurrent {
                    index: i,
                    current_ua: ua,
                });
            }
            if i > 0 && f <= current_table[i - 1].0 {
                return Err(EnergyError::NonIncreasingFrequency { index: i });
            }
        }
        if !(lcd_power_uw_at_200hz >= 0.0 && lcd_power_uw_at_200hz.is_finite()) {
            return Err(EnergyError::InvalidLcdPower(lcd_power_uw_at_200hz));
        }
        Ok(Self {
            clock_source,
            supply_voltage_v,
            current_table,
            lcd_power_uw_at_200hz,
        })
    }

    /// Measured DCO profile at 3 V: 337/341/354 µA at 10/100/500 Hz.
    pub fn dco_3v() -> Self {
        Self::new(
            ClockSource::Dco,
            3.0,
            vec![(10.0, 337.0), (100.0, 341.0), (500.0, 354.0)],
            LCD_POWER_UW_AT_200HZ,
        )
        .expect("built-in table is valid")
    }

    /// Measured VLO profile at 3 V: 68/69/70 µA at 10/100/500 Hz.
    pub fn vlo_3v() -> Self {
        Self::new(
            ClockSource::Vlo,
            3.0,
            vec![(10.0, 68.0), (100.0, 69.0), (500.0, 70.0)],
            LCD_POWER_UW_AT_200HZ,
        )
        .expect("built-in table is valid")
    }

    /// Parse a current table from CSV text with header `frequency_hz,current_uA`.
    pub fn from_csv_str(
        clock_source: ClockSource,
        supply_voltage_v: f64,
        text: &str,
    ) -> Result<Self, EnergyError> {
        let rows = parse_current_csv(text)?;
        Self::new(clock_source, supply_voltage_v, rows, LCD_POWER_UW_AT_200HZ)
    }

    /// Load a current table from a CSV file.
    pub fn from_csv_path<P: AsRef<Path>>(
        clock_source: ClockSource,
        supply_voltage_v: f64,
        path: P,
    ) -> Result<Self, EnergyError> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        Self::from_csv_str(clock_source, supply_voltage_v, &text)
    }

    pub fn clock_source(&self) -> ClockSource {
        self.clock_source
    }

    pub fn supply_voltage_v(&self) -> f64 {
        self.supply_voltage_v
    }

    pub fn current_table(&self) -> &[(f64, f64)] {
        &self.current_table
    }

    /// Interpolated current draw at `frequency_hz`, exact at measured rows;
    /// frequencies outside the measured span are rejected.
    pub fn current_ua_at(&self, frequency_hz: f64) -> Result<f64, EnergyError> {
        let min = self.current_table[0].0;
        let max = self.current_table[self.current_table.len() - 1].0;
        if !(frequency_hz.is_finite() && frequency_hz >= min && frequency_hz <= max) {
            return Err(EnergyError::FrequencyOutOfRange {
                frequency_hz,
                min_hz: min,
                max_hz: max,
            });
        }
        if let Some(&(_, ua)) = self.current_table.iter().find(|&&(f, _)| f == frequency_hz) {
            return Ok(ua);
        }
        let i = self
            .current_table
            .windows(2)
            .position(|w| w[0].0 <= frequency_hz && frequency_hz <= w[1].0)
            .expect("frequency inside measured span");
        let (f0, i0) = self.current_table[i];
        let (f1, i1) = self.current_table[i + 1];
        Ok(i0 + (frequency_hz - f0) / (f1 - f0) * (i1 - i0))
    }

    /// LCD drive power at `frequency_hz`, scaling the 200 Hz bound linearly
    /// with switching frequency (capacitive-load model).
    pub fn lcd_power_uw(&self, frequency_hz: f64) -> f64 {
        self.lcd_power_uw_at_200hz * frequency_hz / LCD_REFERENCE_FREQUENCY_HZ
    }
}

/// Self-sustainability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBudget {
    pub harvested_uw: f64,
    pub consumed_uw: f64,
    /// harvested − consumed.
    pub margin_uw: f64,
    /// margin ≥ 0 (running exactly at balance counts as feasible).
    pub feasible: bool,
}

/// Electrical power harvested by the solar cell, in µW:
/// P = lux_to_flux · illuminance · area · efficiency.
pub fn harvested_power_uw(p: &HarvestParams) -> f64 {
    p.lux_to_flux_w_per_cm2_per_lux * p.illuminance_lux * p.solar_area_cm2 * p.solar_efficiency
        * 1e6
}

/// Total consumption at a modulation frequency, in µW: V·I(f) plus the LCD
/// switching term.
pub fn consumption_power_uw(
    m: &ConsumptionModel,
    modulation_frequency_hz: f64,
) -> Result<f64, EnergyError> {
    let current_ua = m.current_ua_at(modulation_frequency_hz)?;
    Ok(m.supply_voltage_v * current_ua + m.lcd_power_uw(modulation_frequency_hz))
}

/// Harvest-vs-consumption budget at a modulation frequency.
pub fn feasibility(
    p: &HarvestParams,
    m: &ConsumptionModel,
    modulation_frequency_hz: f64,
) -> Result<EnergyBudget, EnergyError> {
    let harvested_uw = harvested_power_uw(p);
    let consumed_uw = consumption_power_uw(m, modulation_frequency_hz)?;
    let margin_uw = harvested_uw - consumed_uw;
    Ok(EnergyBudget {
        harvested_uw,
        consumed_uw,
        margin_uw,
        feasible: margin_uw >= 0.0,
    })
}

fn parse_current_csv(text: &str) -> Result<Vec<(f64, f64)>, EnergyError> {
    // same grammar as the calibration CSV, different header
    crate::channel::parse_two_column_csv(text, CURRENT_CSV_HEADER).map_err(|e| match e {
        crate::channel::ChannelError::Csv { line, message } => EnergyError::Csv { line, message },
        other => EnergyError::Csv {
            line: 0,
            message: other.to_string(),
        },
    })
}
