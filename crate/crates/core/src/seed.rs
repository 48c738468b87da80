//! Deterministic seed derivation for independently sampled tasks.
//!
//! Every sampled quantity in a sweep (grid point, repetition, circuit) gets
//! its own RNG stream derived from the base seed and a list of tags. The
//! derivation depends only on the tags, never on evaluation order, so
//! parallel sweeps reproduce sequential ones bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `tags` into `base`, one splitmix round per tag.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(base), |acc, &tag| splitmix64(acc ^ splitmix64(tag)))
}

/// Stable tag for a real-valued grid coordinate.
pub fn float_tag(x: f64) -> u64 {
    // -0.0 and 0.0 must land on the same stream
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

pub fn rng_for(base: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tags))
}
