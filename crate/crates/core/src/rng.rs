//! Seeded random streams.
//!
//! Every trial draws from its own ChaCha8 stream keyed by
//! `(root_seed, label, trial_index)`:
//!
//! ```text
//! key = splitmix64(splitmix64(root_seed ^ fnv1a64(label)) ^ trial_index)
//! rng = ChaCha8Rng::seed_from_u64(key)
//! ```
//!
//! Trials can therefore run in any order, on any number of threads, and
//! still produce the same results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

/// Environment variable consulted by the CLI for the default root seed.
pub const SEED_ENV_VAR: &str = "BCC_LAB_SEED";
pub const DEFAULT_ROOT_SEED: u64 = 0x00BC_C1AB;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn stream_key(root_seed: u64, label: &str, trial: u64) -> u64 {
    splitmix64(splitmix64(root_seed ^ fnv1a64(label.as_bytes())) ^ trial)
}

pub fn stream(root_seed: u64, label: &str, trial: u64) -> LabRng {
    LabRng::seed_from_u64(stream_key(root_seed, label, trial))
}
