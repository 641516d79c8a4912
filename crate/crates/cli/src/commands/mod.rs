pub mod adapt;
pub mod ber_curve;
pub mod budget;
pub mod pixels;
pub mod required_snr;
pub mod simulate;
