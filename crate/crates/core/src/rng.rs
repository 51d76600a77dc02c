//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha20 (a counter-based
//! generator) keyed by a `(seed, stream)` pair:
//!
//! * key: the 64-bit root seed in little-endian order in bytes 0..8 of the
//!   256-bit ChaCha key, remaining bytes zero;
//! * stream: a 64-bit stream id derived from a path of tags with
//!   [`child_stream`] (SplitMix64 finaliser over `parent ^ tag`).
//!
//! Any implementation of ChaCha20 with a 64-bit stream id reproduces the
//! same streams from the same `(seed, path)`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

/// Well-known stage tags used when splitting the root seed.
pub mod tag {
    pub const GENERATE: u64 = 0x6765_6e65;
    pub const ADVERSARY: u64 = 0x6164_7673;
    pub const SHUFFLE: u64 = 0x7368_7566;
    pub const FILTER: u64 = 0x6669_6c74;
    pub const CENTER: u64 = 0x6365_6e74;
    pub const TOURNAMENT: u64 = 0x746f_7572;
    pub const MONTE_CARLO: u64 = 0x6d63_6d63;
    pub const LOWER_BOUND: u64 = 0x6c62_6e64;
    pub const BENCH: u64 = 0x6265_6e63;
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream id of a child of `parent` labelled `tag`.
pub fn child_stream(parent: u64, tag: u64) -> u64 {
    mix64(parent ^ mix64(tag))
}

/// Stream id for a tag path starting from the root stream 0.
pub fn stream_for(path: &[u64]) -> u64 {
    path.iter().fold(0u64, |s, &t| child_stream(s, t))
}

pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Generator for a tag path below the root seed.
pub fn rng_for(seed: u64, path: &[u64]) -> Rng {
    stream_rng(seed, stream_for(path))
}
