//! Seed derivation for reproducible Monte Carlo runs.
//!
//! Every random stream is keyed by a path of integers below the master seed,
//! e.g. `[point, frame]`. The stream seed is built by folding each path
//! element into a SplitMix64 state, so it depends only on (master seed,
//! path) and never on scheduling or worker count.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p.wrapping_add(GOLDEN))))
}
