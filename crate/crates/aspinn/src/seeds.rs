//! Deterministic seed derivation.
//!
//! Every random draw in the crate comes from a ChaCha stream keyed by a
//! mixed tuple of integers (base seed, role, repetition, iteration, ...).
//! Keyed generators make observation noise and model initialization
//! reproducible and let independent work units run in parallel without
//! sharing generator state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream roles, used as the second component of a seed key.
pub mod role {
    pub const INIT_DATASET: u64 = 1;
    pub const OBSERVATION_NOISE: u64 = 2;
    pub const SEASON: u64 = 3;
    pub const MODEL_INIT: u64 = 4;
    pub const TRAINING: u64 = 5;
    pub const EVALUATION: u64 = 6;
    pub const ACQUISITION: u64 = 7;
}

/// Mixes a key tuple into a single 64-bit seed (SplitMix64 finalizer folds).
pub fn mix(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= splitmix64(p.wrapping_add(h));
        h = splitmix64(h);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A generator keyed by the given tuple.
pub fn rng_for(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(parts))
}
