//! Reflector pixel arrays.
//!
//! A backscatter device reflects light through an array of independently
//! switched pixels (reflector + LCD shutter). Two layouts are modelled:
//!
//! - **Uniform**: N identical pixels. Switching `s` of them on reflects the
//!   fraction `s/N`, giving N+1 distinct levels (all-off included).
//! - **Binary-weighted**: n clusters with area ratio 1:2:4:…, so cluster k
//!   carries weight 2^(k−1). The n on/off flags address 2^n evenly spaced
//!   levels with only n drive lines.
//!
//! All pixels of an array jointly conserve the area of one equivalent
//! circular pixel of diameter `total_diameter_mm`, matching a build where a
//! fixed reflector aperture is subdivided rather than enlarged.

use serde::Serialize;
use thiserror::Error;

/// Largest supported binary-weighted cluster count. 2^n levels must fit the
/// exact-integer range of f64 weight sums with huge margin; real arrays have
/// single-digit cluster counts.
pub const MAX_CLUSTERS: u32 = 32;

/// Errors from pixel-array construction and symbol/state mapping.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PixelArrayError {
    #[error("total diameter must be positive and finite, got {0}")]
    InvalidDiameter(f64),
    #[error("pixel count must be at least 1")]
    InvalidCount,
    #[error("cluster count must be between 1 and {MAX_CLUSTERS}, got {0}")]
    InvalidClusterCount(u32),
    #[error("symbol {symbol} out of range: array provides {levels} levels (0..={})", levels - 1)]
    SymbolOutOfRange { symbol: u64, levels: u64 },
    #[error("pixel state has {actual} flags but the array has {expected} pixels")]
    StateLengthMismatch { expected: usize, actual: usize },
}

/// Pixel layout: identical pixels or binary-weighted clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PixelStructure {
    /// N identical pixels, each of weight 1.
    Uniform(u32),
    /// n clusters, cluster k (1-based) of weight 2^(k−1).
    BinaryWeighted(u32),
}

/// A reflector pixel array with a total-area budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PixelArray {
    structure: PixelStructure,
    total_diameter_mm: f64,
}

/// On/off flags for every pixel (uniform) or cluster (binary-weighted) of an
/// array, lowest index first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelState {
    on_flags: Vec<bool>,
}

impl PixelState {
    /// Flags in pixel order.
    pub fn on_flags(&self) -> &[bool] {
        &self.on_flags
    }

    /// Number of pixels switched on.
    pub fn on_count(&self) -> usize {
        self.on_flags.iter().filter(|&&f| f).count()
    }
}

impl PixelArray {
    /// An array of `count` identical pixels conserving the area of one
    /// circular pixel of diameter `total_diameter_mm`.
    pub fn uniform(count: u32, total_diameter_mm: f64) -> Result<Self, PixelArrayError> {
        if count == 0 {
            return Err(PixelArrayError::InvalidCount);
        }
        Self::validate_diameter(total_diameter_mm)?;
        Ok(Self {
            structure: PixelStructure::Uniform(count),
            total_diameter_mm,
        })
    }

    /// A binary-weighted array of `clusters` clusters conserving the area of
    /// one circular pixel of diameter `total_diameter_mm`.
    pub fn binary_weighted(clusters: u32, total_diameter_mm: f64) -> Result<Self, PixelArrayError> {
        if clusters == 0 || clusters > MAX_CLUSTERS {
            return Err(PixelArrayError::InvalidClusterCount(clusters));
        }
        Self::validate_diameter(total_diameter_mm)?;
        Ok(Self {
            structure: PixelStructure::BinaryWeighted(clusters),
            total_diameter_mm,
        })
    }

    fn validate_diameter(d: f64) -> Result<(), PixelArrayError> {
        if d > 0.0 && d.is_finite() {
            Ok(())
        } else {
            Err(PixelArrayError::InvalidDiameter(d))
        }
    }

    pub fn structure(&self) -> PixelStructure {
        self.structure
    }

    /// Diameter of the equivalent single circular pixel, in millimetres.
    pub fn total_diameter_mm(&self) -> f64 {
        self.total_diameter_mm
    }

    /// Number of independently switched units (pixels or clusters).
    pub fn pixel_count(&self) -> usize {
        match self.structure {
            PixelStructure::Uniform(n) => n as usize,
            PixelStructure::BinaryWeighted(n) => n as usize,
        }
    }

    /// Number of distinct reflected-amplitude levels the array can produce.
    ///
    /// Binary-weighted n-cluster arrays produce 2^n levels; uniform N-pixel
    /// arrays produce N+1 (the all-off level counts).
    pub fn levels_available(&self) -> u64 {
        match self.structure {
            PixelStructure::Uniform(n) => u64::from(n) + 1,
            PixelStructure::BinaryWeighted(n) => 1u64 << n,
        }
    }

    /// Relative weight (area share) of pixel `k`, 0-based.
    fn weight(&self, k: usize) -> u64 {
        match self.structure {
            PixelStructure::Uniform(_) => 1,
            PixelStructure::BinaryWeighted(_) => 1u64 << k,
        }
    }

    /// Sum of all pixel weights; the denominator of [`Self::reflected_fraction`].
    pub fn total_weight(&self) -> u64 {
        match self.structure {
            PixelStructure::Uniform(n) => u64::from(n),
            PixelStructure::BinaryWeighted(n) => (1u64 << n) - 1,
        }
    }

    /// Pixel on/off pattern that produces level `symbol`.
    ///
    /// Binary-weighted: cluster k is on iff bit k−1 of the symbol is set, so
    /// the on-weight sum equals the symbol. Uniform: the `symbol`
    /// lowest-index pixels are on.
    pub fn symbol_to_state(&self, symbol: u64) -> Result<PixelState, PixelArrayError> {
        let levels = self.levels_available();
        if symbol >= levels {
            return Err(PixelArrayError::SymbolOutOfRange { symbol, levels });
        }
        let on_flags = match self.structure {
            PixelStructure::Uniform(n) => (0..n as u64).map(|k| k < symbol).collect(),
            PixelStructure::BinaryWeighted(n) => {
                (0..n).map(|k| symbol & (1 << k) != 0).collect()
            }
        };
        Ok(PixelState { on_flags })
    }

    /// Level index encoded by a pixel state (the on-weight sum).
    ///
    /// Inverse of [`Self::symbol_to_state`] for binary-weighted arrays and
    /// for uniform states that follow the lowest-index-first convention; for
    /// other uniform states it returns the level with the same on-count.
    pub fn state_to_symbol(&self, state: &PixelState) -> Result<u64, PixelArrayError> {
        self.check_state(state)?;
        Ok(state
            .on_flags
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(k, _)| self.weight(k))
            .sum())
    }

    /// Fraction of incident light reflected in `state`: the on-weight sum
    /// over the total weight. Level s therefore reflects exactly s/(L−1)
    /// where L = [`Self::levels_available`].
    pub fn reflected_fraction(&self, state: &PixelState) -> Result<f64, PixelArrayError> {
        let on_weight = self.state_to_symbol(state)?;
        Ok(on_weight as f64 / self.total_weight() as f64)
    }

    fn check_state(&self, state: &PixelState) -> Result<(), PixelArrayError> {
        let expected = self.pixel_count();
        if state.on_flags.len() != expected {
            return Err(PixelArrayError::StateLengthMismatch {
                expected,
                actual: state.on_flags.len(),
            });
        }
        Ok(())
    }

    /// Per-pixel diameters in millimetres, ascending.
    ///
    /// Pixel areas are proportional to their weights and sum to the area of
    /// the equivalent single pixel, so d_k = D·√(w_k / Σw).
    pub fn pixel_diameters(&self) -> Vec<f64> {
        let total = self.total_weight() as f64;
        (0..self.pixel_count())
            .map(|k| self.total_diameter_mm * (self.weight(k) as f64 / total).sqrt())
            .collect()
    }
}
