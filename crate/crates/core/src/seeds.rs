//! Deterministic seed derivation.
//!
//! Every random stream in the crate is keyed by (seed, stream tag, index) so
//! that restarts, trials and codebooks can run in any order and still produce
//! identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ mix64(stream)) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

pub fn rng_for(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, stream, index))
}

/// Stream tags.
pub mod stream {
    pub const U_RESTART: u64 = 1;
    pub const U_OUTER: u64 = 2;
    pub const U_CODEBOOK: u64 = 10;
    pub const AUX_BINS: u64 = 11;
    pub const SOURCE_BINS: u64 = 12;
    pub const V_CODEBOOK: u64 = 13;
    pub const TRIAL: u64 = 20;
    pub const EVE_SAMPLES: u64 = 21;
}
