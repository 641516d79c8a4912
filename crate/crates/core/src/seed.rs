//! Deterministic sub-seed derivation.
//!
//! Monte-Carlo chunks and sweep cells each get an independent RNG stream
//! derived from the user's base seed, so results are reproducible regardless
//! of execution order or thread count.

/// SplitMix64 finalizer. Good avalanche, cheap, stable across platforms.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for stream `index` of base seed `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

/// Derive the seed for cell `(row, col)` of a two-dimensional sweep.
pub fn derive_seed2(base: u64, row: u64, col: u64) -> u64 {
    derive_seed(derive_seed(base, row), col)
}
