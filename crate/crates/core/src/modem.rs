//! Gray-coded M-PAM modem.
//!
//! Bits are grouped MSB-first into log2(M)-bit words and mapped to amplitude
//! levels through the binary-reflected Gray code, so adjacent levels differ
//! in exactly one bit and a nearest-neighbour symbol error costs one bit
//! error. Waveforms are NRZ at the LCD-limited symbol rate, optionally shaped
//! by a first-order RC transition to mimic the shutter's finite response.
//! Detection averages each symbol's samples and slices at the midpoints
//! between nominal levels.

use crate::pixel_array::{PixelArray, PixelArrayError};
use thiserror::Error;

/// Symbol rate imposed by a ~5 ms LCD shutter response.
pub const DEFAULT_SYMBOL_RATE_HZ: f64 = 200.0;

/// Default oversampling: 50 samples/symbol, i.e. 10 kHz at 200 Sym/s.
pub const DEFAULT_SAMPLES_PER_SYMBOL: usize = 50;

/// Errors from scheme construction, bit mapping, and (de)modulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModemError {
    #[error("modulation order must be a power of two >= 2, got {0}")]
    InvalidOrder(u32),
    #[error("symbol rate must be positive and finite, got {0}")]
    InvalidSymbolRate(f64),
    #[error("symbol rate {rate_hz} Hz exceeds 1/response_time = {max_hz} Hz")]
    SymbolRateExceedsResponse { rate_hz: f64, max_hz: f64 },
    #[error("bit count {n_bits} is not a multiple of {bits_per_symbol} bits/symbol")]
    BitFraming { n_bits: usize, bits_per_symbol: u32 },
    #[error("sample count {n_samples} is not a multiple of {samples_per_symbol} samples/symbol")]
    SampleFraming {
        n_samples: usize,
        samples_per_symbol: usize,
    },
    #[error("symbol {symbol} out of range for order {order}")]
    SymbolOutOfRange { symbol: u64, order: u32 },
    #[error("array provides {levels} levels, fewer than modulation order {order}")]
    ArrayTooCoarse { levels: u64, order: u32 },
    #[error("samples_per_symbol must be at least 1")]
    InvalidSamplesPerSymbol,
    #[error("transition time constant must be positive and finite, got {0}")]
    InvalidTransitionTau(f64),
    #[error("reference amplitude must be positive and finite, got {0}")]
    InvalidReferenceAmplitude(f64),
    #[error(transparent)]
    PixelArray(#[from] PixelArrayError),
}

/// Binary-reflected Gray code of a level index.
pub fn gray_encode(level: u64) -> u64 {
    level ^ (level >> 1)
}

/// Level index whose Gray code is `code`.
pub fn gray_decode(code: u64) -> u64 {
    // prefix-XOR via doubling: after step k, each bit holds the XOR of the
    // 2^k bits above it
    let mut level = code;
    let mut shift = 1;
    while shift < 64 {
        level ^= level >> shift;
        shift <<= 1;
    }
    level
}

/// An M-PAM scheme: order, bit mapping, and symbol rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationScheme {
    order: u32,
    symbol_rate_hz: f64,
}

impl ModulationScheme {
    /// A scheme of the given order at `symbol_rate_hz`.
    pub fn new(order: u32, symbol_rate_hz: f64) -> Result<Self, ModemError> {
        if order < 2 || !order.is_power_of_two() {
            return Err(ModemError::InvalidOrder(order));
        }
        if !(symbol_rate_hz > 0.0 && symbol_rate_hz.is_finite()) {
            return Err(ModemError::InvalidSymbolRate(symbol_rate_hz));
        }
        Ok(Self {
            order,
            symbol_rate_hz,
        })
    }

    /// Like [`Self::new`], but additionally enforces that the symbol rate
    /// does not exceed what the shutter response time allows (1/response).
    pub fn with_lcd_response(
        order: u32,
        symbol_rate_hz: f64,
        response_time_s: f64,
    ) -> Result<Self, ModemError> {
        let scheme = Self::new(order, symbol_rate_hz)?;
        let max_hz = 1.0 / response_time_s;
        if symbol_rate_hz > max_hz {
            return Err(ModemError::SymbolRateExceedsResponse {
                rate_hz: symbol_rate_hz,
                max_hz,
            });
        }
        Ok(scheme)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn symbol_rate_hz(&self) -> f64 {
        self.symbol_rate_hz
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.order.trailing_zeros()
    }

    /// Delivered bit rate: symbol rate × bits/symbol.
    pub fn bits_per_second(&self) -> f64 {
        self.symbol_rate_hz * f64::from(self.bits_per_symbol())
    }

    /// Map a bit stream to Gray-coded PAM levels, MSB first within each
    /// log2(M)-bit group.
    pub fn bits_to_symbols(&self, bits: &[bool]) -> Result<Vec<u64>, ModemError> {
        let k = self.bits_per_symbol() as usize;
        if bits.len() % k != 0 {
            return Err(ModemError::BitFraming {
                n_bits: bits.len(),
                bits_per_symbol: self.bits_per_symbol(),
            });
        }
        Ok(bits
            .chunks_exact(k)
            .map(|word| {
                let code = word.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
                gray_decode(code)
            })
            .collect())
    }

    /// Inverse of [`Self::bits_to_symbols`].
    pub fn symbols_to_bits(&self, symbols: &[u64]) -> Result<Vec<bool>, ModemError> {
        let k = self.bits_per_symbol() as usize;
        let mut bits = Vec::with_capacity(symbols.len() * k);
        for &s in symbols {
            if s >= u64::from(self.order) {
                return Err(ModemError::SymbolOutOfRange {
                    symbol: s,
                    order: self.order,
                });
            }
            let code = gray_encode(s);
            for i in (0..k).rev() {
                bits.push(code & (1 << i) != 0);
            }
        }
        Ok(bits)
    }
}

/// A sampled transmit waveform, normalized to [0, 1] before channel scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate_hz: f64,
    samples_per_symbol: usize,
}

impl Waveform {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn samples_per_symbol(&self) -> usize {
        self.samples_per_symbol
    }

    pub fn symbol_count(&self) -> usize {
        self.samples.len() / self.samples_per_symbol
    }
}

/// Generate the reflected-amplitude waveform for a symbol stream.
///
/// Each PAM symbol drives the array level nearest its nominal amplitude
/// s/(M−1); when the array has exactly M levels that is level s itself, and a
/// coarser-than-M array is rejected. With `transition_tau_s` set, every level
/// change follows a first-order exponential approach with that time constant
/// instead of an instantaneous step (the waveform starts settled at the first
/// symbol's level).
pub fn modulate(
    symbols: &[u64],
    array: &PixelArray,
    scheme: &ModulationScheme,
    samples_per_symbol: usize,
    transition_tau_s: Option<f64>,
) -> Result<Waveform, ModemError> {
    if samples_per_symbol == 0 {
        return Err(ModemError::InvalidSamplesPerSymbol);
    }
    let levels = array.levels_available();
    let order = scheme.order();
    if levels < u64::from(order) {
        return Err(ModemError::ArrayTooCoarse { levels, order });
    }
    if let Some(tau) = transition_tau_s {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(ModemError::InvalidTransitionTau(tau));
        }
    }

    let mut amplitudes = Vec::with_capacity(symbols.len());
    for &s in symbols {
        if s >= u64::from(order) {
            return Err(ModemError::SymbolOutOfRange { symbol: s, order });
        }
        let level = nearest_level(s, order, levels);
        let state = array.symbol_to_state(level)?;
        amplitudes.push(array.reflected_fraction(&state)?);
    }

    let sample_rate_hz = scheme.symbol_rate_hz() * samples_per_symbol as f64;
    let mut samples = Vec::with_capacity(amplitudes.len() * samples_per_symbol);
    match transition_tau_s {
        None => {
            for &a in &amplitudes {
                samples.extend(std::iter::repeat(a).take(samples_per_symbol));
            }
        }
        Some(tau) => {
            let alpha = (-1.0 / (sample_rate_hz * tau)).exp();
            let mut level = *amplitudes.first().unwrap_or(&0.0);
            for &target in &amplitudes {
                for _ in 0..samples_per_symbol {
                    level = target + (level - target) * alpha;
                    samples.push(level);
                }
            }
        }
    }

    Ok(Waveform {
        samples,
        sample_rate_hz,
        samples_per_symbol,
    })
}

/// Array level nearest the nominal PAM amplitude s/(M−1), half-up in level
/// index. Identity when the array has exactly M levels.
fn nearest_level(symbol: u64, order: u32, levels: u64) -> u64 {
    let m1 = u64::from(order) - 1;
    let num = 2 * u128::from(symbol) * u128::from(levels - 1) + u128::from(m1);
    (num / (2 * u128::from(m1))) as u64
}

/// Slice received samples back into PAM symbols.
///
/// Each symbol's samples are averaged, normalized by `reference_amplitude`
/// (the known channel gain for a fully-on array), and mapped to the nearest
/// nominal level k/(M−1). A value exactly at a midpoint resolves to the lower
/// level.
pub fn detect(
    received: &[f64],
    scheme: &ModulationScheme,
    reference_amplitude: f64,
    samples_per_symbol: usize,
) -> Result<Vec<u64>, ModemError> {
    if samples_per_symbol == 0 {
        return Err(ModemError::InvalidSamplesPerSymbol);
    }
    if !(reference_amplitude > 0.0 && reference_amplitude.is_finite()) {
        return Err(ModemError::InvalidReferenceAmplitude(reference_amplitude));
    }
    if received.len() % samples_per_symbol != 0 {
        return Err(ModemError::SampleFraming {
            n_samples: received.len(),
            samples_per_symbol,
        });
    }
    let m1 = f64::from(scheme.order() - 1);
    Ok(received
        .chunks_exact(samples_per_symbol)
        .map(|chunk| {
            let mean = chunk.iter().sum::<f64>() / samples_per_symbol as f64;
            slice_to_level(mean / reference_amplitude, m1)
        })
        .collect())
}

/// Nearest level index to `normalized·(M−1)`, ties resolving downward,
/// clamped into 0..=M−1.
pub(crate) fn slice_to_level(normalized: f64, m1: f64) -> u64 {
    let k = (normalized * m1 - 0.5).ceil();
    if k < 0.0 {
        0
    } else if k > m1 {
        m1 as u64
    } else {
        k as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ook() -> ModulationScheme {
        ModulationScheme::new(2, DEFAULT_SYMBOL_RATE_HZ).unwrap()
    }

    fn pam(order: u32) -> ModulationScheme {
        ModulationScheme::new(order, DEFAULT_SYMBOL_RATE_HZ).unwrap()
    }

    #[test]
    fn scheme_rejects_bad_orders_and_rates() {
        assert!(matches!(
            ModulationScheme::new(3, 200.0),
            Err(ModemError::InvalidOrder(3))
        ));
        assert!(matches!(
            ModulationScheme::new(1, 200.0),
            Err(ModemError::InvalidOrder(1))
        ));
        assert!(matches!(
            ModulationScheme::new(4, 0.0),
            Err(ModemError::InvalidSymbolRate(_))
        ));
    }

    #[test]
    fn lcd_response_caps_symbol_rate() {
        // 5 ms response allows at most 200 Hz
        assert!(ModulationScheme::with_lcd_response(2, 200.0, 0.005).is_ok());
        assert!(matches!(
            ModulationScheme::with_lcd_response(2, 250.0, 0.005),
            Err(ModemError::SymbolRateExceedsResponse { .. })
        ));
    }

    #[test]
    fn ook_bit_mapping_is_identity() {
        assert_eq!(ook().bits_to_symbols(&[false]).unwrap(), vec![0]);
        assert_eq!(ook().symbols_to_bits(&[0]).unwrap(), vec![false]);
    }

    #[test]
    fn gray_mapping_matches_enumerated_table() {
        // Independent oracle: build the binary-reflected code by the
        // reflect-and-prefix construction and check both directions.
        fn reflected_table(bits: u32) -> Vec<u64> {
            let mut table = vec![0u64, 1];
            for _ in 1..bits {
                let mut next: Vec<u64> = table.clone();
                next.extend(table.iter().rev().map(|c| c | (1 << table.len().ilog2())));
                table = next;
            }
            table
        }
        for bits in 1..=4u32 {
            let table = reflected_table(bits);
            for (level, &code) in table.iter().enumerate() {
                assert_eq!(gray_encode(level as u64), code);
                assert_eq!(gray_decode(code), level as u64);
            }
        }
    }

    #[test]
    fn bits_11_map_to_level_2_at_order_4() {
        assert_eq!(pam(4).bits_to_symbols(&[true, true]).unwrap(), vec![2]);
        assert_eq!(pam(4).symbols_to_bits(&[2]).unwrap(), vec![true, true]);
    }

    #[test]
    fn eight_pam_groups_decode_via_gray() {
        let bits = [false, false, false, true, true, true];
        assert_eq!(pam(8).bits_to_symbols(&bits).unwrap(), vec![0, 5]);
    }

    #[test]
    fn non_divisible_bit_count_is_framing_error() {
        assert!(matches!(
            pam(4).bits_to_symbols(&[true, false, true]),
            Err(ModemError::BitFraming {
                n_bits: 3,
                bits_per_symbol: 2
            })
        ));
    }

    #[test]
    fn symbol_out_of_range_rejected() {
        assert!(matches!(
            pam(4).symbols_to_bits(&[4]),
            Err(ModemError::SymbolOutOfRange {
                symbol: 4,
                order: 4
            })
        ));
    }

    #[test]
    fn modulate_ideal_nrz() {
        let arr = PixelArray::binary_weighted(1, 20.0).unwrap();
        let wf = modulate(&[0, 1], &arr, &ook(), 4, None).unwrap();
        assert_eq!(wf.samples(), &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(wf.symbol_count(), 2);
        assert_eq!(wf.sample_rate_hz(), 800.0);
    }

    #[test]
    fn modulate_level_linearity() {
        let arr = PixelArray::binary_weighted(3, 20.0).unwrap();
        let wf = modulate(&[5], &arr, &pam(8), 1, None).unwrap();
        assert_eq!(wf.samples(), &[5.0 / 7.0]);
    }

    #[test]
    fn modulate_full_swing_on_finer_array() {
        // OOK on a 3-cluster array toggles all clusters, not just the LSB one.
        let arr = PixelArray::binary_weighted(3, 20.0).unwrap();
        let wf = modulate(&[0, 1], &arr, &ook(), 1, None).unwrap();
        assert_eq!(wf.samples(), &[0.0, 1.0]);
    }

    #[test]
    fn modulate_rejects_coarse_array() {
        let arr = PixelArray::binary_weighted(1, 20.0).unwrap();
        assert!(matches!(
            modulate(&[0], &arr, &pam(4), 1, None),
            Err(ModemError::ArrayTooCoarse {
                levels: 2,
                order: 4
            })
        ));
    }

    #[test]
    fn rc_transition_first_order_step() {
        let arr = PixelArray::binary_weighted(1, 20.0).unwrap();
        let scheme = ModulationScheme::new(2, 1.0).unwrap();
        // tau = one sample period (1 s at 1 Hz, 1 sample/symbol)
        let wf = modulate(&[0, 1], &arr, &scheme, 1, Some(1.0)).unwrap();
        assert!((wf.samples()[0] - 0.0).abs() < 1e-15);
        let expected = 1.0 - (-1.0f64).exp();
        assert!((wf.samples()[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn rc_transition_keeps_samples_in_range() {
        let arr = PixelArray::binary_weighted(2, 20.0).unwrap();
        let wf = modulate(&[0, 3, 1, 2], &arr, &pam(4), 5, Some(0.002)).unwrap();
        assert!(wf.samples().iter().all(|&s| (0.0..=1.0).contains(&s)));
    }

    #[test]
    fn noiseless_detection_recovers_all_levels() {
        let arr = PixelArray::binary_weighted(3, 20.0).unwrap();
        let symbols: Vec<u64> = (0..8).collect();
        let wf = modulate(&symbols, &arr, &pam(8), 4, None).unwrap();
        let detected = detect(wf.samples(), &pam(8), 1.0, 4).unwrap();
        assert_eq!(detected, symbols);
    }

    #[test]
    fn detection_midpoint_and_tie_break() {
        let ook = ook();
        assert_eq!(detect(&[0.49], &ook, 1.0, 1).unwrap(), vec![0]);
        assert_eq!(detect(&[0.51], &ook, 1.0, 1).unwrap(), vec![1]);
        // exactly at the midpoint resolves to the lower level
        assert_eq!(detect(&[0.5], &ook, 1.0, 1).unwrap(), vec![0]);
        // clamped outside the constellation
        assert_eq!(detect(&[-0.3, 1.4], &ook, 1.0, 1).unwrap(), vec![0, 1]);
    }

    #[test]
    fn detection_framing_error() {
        assert!(matches!(
            detect(&[0.0, 1.0, 0.5], &ook(), 1.0, 2),
            Err(ModemError::SampleFraming {
                n_samples: 3,
                samples_per_symbol: 2
            })
        ));
    }

    #[test]
    fn throughput_bookkeeping() {
        assert_eq!(pam(8).bits_per_second(), 600.0);
        assert_eq!(pam(4).bits_per_second(), 400.0);
        assert_eq!(ook().bits_per_second(), 200.0);
    }

    #[test]
    fn random_bits_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let bits: Vec<bool> = (0..1026).map(|_| rng.random()).collect();
        let scheme = pam(8);
        let symbols = scheme.bits_to_symbols(&bits).unwrap();
        assert_eq!(scheme.symbols_to_bits(&symbols).unwrap(), bits);
    }
}
