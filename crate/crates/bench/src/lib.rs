//! Shared fixtures for the criterion benches.

use pixvlc_core::channel::ChannelModel;
use pixvlc_core::modem::ModulationScheme;
use pixvlc_core::pixel_array::PixelArray;
use pixvlc_core::sim_pipeline::ScenarioConfig;

/// The measured distance/SNR calibration used across benches.
pub fn reference_calibration() -> Vec<(f64, f64)> {
    vec![(2.0, 26.55), (3.0, 21.15), (4.0, 18.80), (5.0, 14.98)]
}

/// An 8-PAM scenario on a three-cluster array at 2 m.
pub fn reference_scenario(n_bits: u64, samples_per_symbol: usize) -> ScenarioConfig {
    ScenarioConfig {
        array: PixelArray::binary_weighted(3, 20.0).expect("valid array"),
        scheme: ModulationScheme::new(8, 200.0).expect("valid scheme"),
        channel: ChannelModel::from_table(reference_calibration()).expect("valid table"),
        distance_m: 2.0,
        n_bits,
        seed: 1,
        samples_per_symbol,
        transition_tau_s: None,
    }
}
