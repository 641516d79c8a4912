//! SNR unit conversions and the noise convention shared by the channel model,
//! the Monte-Carlo estimator, and the analytic BER formula.
//!
//! SNR here is the squared ratio of the signal's peak-to-peak amplitude to
//! the noise, with the noise measured peak-to-peak as well (2σ). Under that
//! convention a midpoint-slicing PAM detector sees a per-boundary error
//! probability of Q(√SNR/(M−1)), which is exactly the argument of the
//! analytic BER formula in [`crate::ber`]; using the raw standard deviation
//! instead would disagree with it by a factor of two in amplitude.

/// Convert a decibel SNR to its linear power ratio.
pub fn db_to_linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Convert a linear power ratio to decibels.
pub fn linear_to_db(snr_linear: f64) -> f64 {
    10.0 * snr_linear.log10()
}

/// Noise standard deviation for a given peak-to-peak signal amplitude and
/// linear SNR: σ = pp / (2·√SNR).
///
/// An infinite SNR yields σ = 0 (noiseless channel).
pub fn noise_sigma(peak_to_peak: f64, snr_linear: f64) -> f64 {
    if snr_linear.is_infinite() {
        0.0
    } else {
        peak_to_peak / (2.0 * snr_linear.sqrt())
    }
}
