//! Keyed random streams: every draw is addressed by (seed, key words), so
//! results do not depend on the order in which draws are made.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Seed = u64;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a seed and a key path.
pub fn derive(seed: Seed, key: &[u64]) -> u64 {
    key.iter().fold(splitmix(seed), |h, &k| splitmix(h ^ splitmix(k)))
}

/// Child stream for a key path.
pub fn stream(seed: Seed, key: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, key))
}

/// Uniform value in 0..range from a keyed stream.
pub fn uniform(seed: Seed, key: &[u64], range: u64) -> u64 {
    debug_assert!(range > 0);
    if range == 1 {
        0
    } else {
        stream(seed, key).gen_range(0..range)
    }
}

/// Bits charged for a uniform draw over `range` values.
pub fn bits_for(range: u64) -> u64 {
    if range <= 1 {
        0
    } else {
        64 - (range - 1).leading_zeros() as u64
    }
}

/// Inverse-CDF draw from a pmf slice given u in [0,1).
pub fn sample_index(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &w) in p.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = k;
            if u < acc {
                return k;
            }
        }
    }
    last
}
