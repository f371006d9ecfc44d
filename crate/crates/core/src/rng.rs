//! Deterministic sub-stream derivation.
//!
//! Every random quantity in a run is drawn from a ChaCha stream keyed by the
//! run's master seed plus a `(purpose, index)` pair, so reward draws for one
//! arm never depend on how many draws some other consumer made.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Reward = 1,
    Policy = 2,
    Instance = 3,
    Shuffle = 4,
    Environment = 5,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `(seed, purpose, index)` into a 64-bit child seed.
pub fn derive_seed(seed: u64, purpose: Purpose, index: u64) -> u64 {
    let a = splitmix64(seed);
    let b = splitmix64(a ^ (purpose as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(b ^ index)
}

/// A ChaCha8 stream for `(seed, purpose, index)`.
pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..].copy_from_slice(&derive_seed(seed, purpose, index).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
