//! Physical-layer toolkit for pixelated visible-light-communication (VLC)
//! backscatter uplinks.
//!
//! A passive VLC backscatter device signals by switching LCD shutters that sit
//! on top of reflectors, modulating how much ambient light it bounces back
//! toward the receiver. A single shutter only supports on-off keying; an array
//! of independently switched pixels produces multiple reflected-amplitude
//! levels and therefore M-PAM. This crate models that link end to end:
//!
//! - [`pixel_array`] — reflector-pixel geometry (uniform or binary-weighted
//!   clusters), symbol-to-pixel-state mapping, and the reflected-amplitude
//!   fraction each state produces.
//! - [`modem`] — Gray-coded M-PAM bit mapping, waveform generation at the
//!   LCD-limited symbol rate, and threshold detection.
//! - [`channel`] — distance-to-SNR calibration (measured table or fitted
//!   power law) and worst-case additive Gaussian noise.
//! - [`ber`] — analytic bit-error rate, required-SNR inversion, and a seeded
//!   Monte-Carlo estimator that serves as the independent check.
//! - [`link_adapt`] — distance-aware rate adaptation: pick the highest PAM
//!   order whose required SNR the link clears.
//! - [`energy`] — solar harvest vs. microcontroller/LCD consumption and the
//!   self-sustainability verdict.
//! - [`sim_pipeline`] — the composed transmit → reflect → receive simulation
//!   with deterministic seeding and distance × order sweeps.
//!
//! All randomness is seeded and reproducible: the same configuration and seed
//! produce bit-identical results, including across parallel sweep execution.

pub mod ber;
pub mod channel;
pub mod energy;
pub mod link_adapt;
pub mod modem;
pub mod pixel_array;
pub mod seed;
pub mod sim_pipeline;
pub mod snr;

pub use ber::{
    ber_analytic, estimate_ber_monte_carlo, estimate_ber_monte_carlo_chunked, q_function,
    required_snr_db, BerError, BerReport,
};
pub use channel::{
    apply_awgn, fit_power_law, ChannelError, ChannelMode, ChannelModel, ChannelOutput,
    PowerLawFit,
};
pub use energy::{
    consumption_power_uw, feasibility, harvested_power_uw, ClockSource, ConsumptionModel,
    EnergyBudget, EnergyError, HarvestParams,
};
pub use link_adapt::{
    adaptation_table, select_modulation, AdaptationDecision, AdaptationPolicy, PolicyError,
};
pub use modem::{detect, gray_decode, gray_encode, modulate, ModemError, ModulationScheme, Waveform};
pub use pixel_array::{PixelArray, PixelArrayError, PixelState, PixelStructure};
pub use sim_pipeline::{
    run_scenario, sweep, ScenarioConfig, ScenarioResult, SimError, SweepCell, SweepMatrix,
};
pub use snr::{db_to_linear, linear_to_db, noise_sigma};
