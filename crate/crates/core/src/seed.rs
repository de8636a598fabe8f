//! Deterministic seed derivation for independent, reproducible sub-streams.
//!
//! Every place that fans out work (restarts, extraction rounds, simulation
//! replications) derives a child seed from (parent seed, stream index) so the
//! result is independent of scheduling and thread count.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for sub-stream `index` of the stream seeded by `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_mul(GOLDEN) ^ 0xD1B5_4A32_D192_ED03))
}
