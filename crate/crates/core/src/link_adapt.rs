//! Distance-aware rate adaptation.
//!
//! At short range the link clears the SNR requirement of high PAM orders and
//! should use them for throughput; at long range only the coarser
//! constellations stay below the target BER. The policy here is the static
//! per-distance rule: pick the highest allowed order whose required SNR the
//! measured/modelled SNR meets (boundary inclusive), or report an infeasible
//! link with zero throughput.

use crate::ber::{required_snr_db, BerError};
use crate::channel::{ChannelError, ChannelModel};
use serde::Serialize;
use thiserror::Error;

/// Errors from policy construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("allowed orders must not be empty")]
    EmptyOrders,
    #[error("allowed orders must be strictly ascending powers of two >= 2, got {0:?}")]
    InvalidOrders(Vec<u32>),
    #[error("target BER must be strictly inside (0, 0.5), got {0}")]
    InvalidTargetBer(f64),
    #[error("symbol rate must be positive and finite, got {0}")]
    InvalidSymbolRate(f64),
}

/// Which PAM orders may be chosen, at what target BER and symbol rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptationPolicy {
    allowed_orders: Vec<u32>,
    target_ber: f64,
    symbol_rate_hz: f64,
}

impl Default for AdaptationPolicy {
    /// Orders 2/4/8 at target BER 1e−3 and 200 Sym/s.
    fn default() -> Self {
        Self {
            allowed_orders: vec![2, 4, 8],
            target_ber: 1e-3,
            symbol_rate_hz: 200.0,
        }
    }
}

impl AdaptationPolicy {
    pub fn new(
        allowed_orders: Vec<u32>,
        target_ber: f64,
        symbol_rate_hz: f64,
    ) -> Result<Self, PolicyError> {
        if allowed_orders.is_empty() {
            return Err(PolicyError::EmptyOrders);
        }
        let ascending = allowed_orders.windows(2).all(|w| w[0] < w[1]);
        let valid = allowed_orders
            .iter()
            .all(|&m| m >= 2 && m.is_power_of_two());
        if !ascending || !valid {
            return Err(PolicyError::InvalidOrders(allowed_orders));
        }
        if !(target_ber > 0.0 && target_ber < 0.5) {
            return Err(PolicyError::InvalidTargetBer(target_ber));
        }
        if !(symbol_rate_hz > 0.0 && symbol_rate_hz.is_finite()) {
            return Err(PolicyError::InvalidSymbolRate(symbol_rate_hz));
        }
        Ok(Self {
            allowed_orders,
            target_ber,
            symbol_rate_hz,
        })
    }

    pub fn allowed_orders(&self) -> &[u32] {
        &self.allowed_orders
    }

    pub fn target_ber(&self) -> f64 {
        self.target_ber
    }

    pub fn symbol_rate_hz(&self) -> f64 {
        self.symbol_rate_hz
    }
}

/// Outcome of rate adaptation at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptationDecision {
    /// Distance the SNR was evaluated at; `None` for SNR-only decisions.
    pub distance_m: Option<f64>,
    pub snr_db: f64,
    /// Highest feasible order, absent when even the lowest fails.
    pub chosen_order: Option<u32>,
    /// symbol_rate × log2(chosen order); 0 when infeasible.
    pub throughput_bps: f64,
    /// SNR surplus over the chosen order's requirement. For an infeasible
    /// link this is the (negative) shortfall to the lowest allowed order.
    pub margin_db: f64,
}

/// Required SNR for `order` at `target`, treating targets above the
/// order's zero-SNR BER as met by any SNR.
fn required_or_unbounded(order: u32, target: f64) -> f64 {
    match required_snr_db(order, target) {
        Ok(snr) => snr,
        Err(BerError::TargetOutOfRange { max, .. }) if target >= max => f64::NEG_INFINITY,
        Err(_) => unreachable!("policy validation bounds the target"),
    }
}

/// Choose the highest allowed order whose required SNR is met (≥) at
/// `snr_db`.
pub fn select_modulation(snr_db: f64, policy: &AdaptationPolicy) -> AdaptationDecision {
    let mut chosen: Option<(u32, f64)> = None;
    for &order in &policy.allowed_orders {
        let required = required_or_unbounded(order, policy.target_ber);
        if snr_db >= required {
            chosen = Some((order, required));
        }
    }
    match chosen {
        Some((order, required)) => AdaptationDecision {
            distance_m: None,
            snr_db,
            chosen_order: Some(order),
            throughput_bps: policy.symbol_rate_hz * f64::from(order.trailing_zeros()),
            margin_db: snr_db - required,
        },
        None => AdaptationDecision {
            distance_m: None,
            snr_db,
            chosen_order: None,
            throughput_bps: 0.0,
            margin_db: snr_db - required_or_unbounded(policy.allowed_orders[0], policy.target_ber),
        },
    }
}

/// Evaluate the channel at each distance and run [`select_modulation`];
/// output order matches input order.
pub fn adaptation_table(
    model: &ChannelModel,
    distances: &[f64],
    policy: &AdaptationPolicy,
) -> Result<Vec<AdaptationDecision>, ChannelError> {
    distances
        .iter()
        .map(|&d| {
            let snr_db = model.snr_at_distance(d)?;
            let mut decision = select_modulation(snr_db, policy);
            decision.distance_m = Some(d);
            Ok(decision)
        })
        .collect()
}
