//! Deterministic seeded randomness shared by every sampler.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for trial `index` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
