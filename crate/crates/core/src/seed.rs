//! Counter-based seed derivation.
//!
//! Every randomized loop draws item `i` from its own generator seeded with
//! `derive(seed, i)`, so results do not depend on iteration order or on how
//! work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `index`-th item of the stream rooted at `seed`.
pub fn derive(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Named sub-streams so that independent consumers of one user seed never collide.
pub fn substream(seed: u64, tag: &str) -> u64 {
    tag.bytes()
        .fold(splitmix64(seed ^ 0x7465_7472_6162_6c6b), |acc, b| {
            splitmix64(acc ^ u64::from(b))
        })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
