//! Seeded randomness with order-independent sub-streams.
//!
//! Every consumer of randomness derives its own stream from the run seed and
//! a `(label, index)` pair, so parallel and serial execution draw identical
//! per-consumer sequences no matter when the streams are created.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The concrete RNG used everywhere in the crate.
pub type RandomStream = ChaCha8Rng;

/// Root stream for a run seed.
pub fn seeded_rng(seed: u64) -> RandomStream {
    ChaCha8Rng::seed_from_u64(splitmix64(seed))
}

/// Derive an independent sub-stream identified by `(label, index)`.
///
/// The derivation is a pure function of its inputs; creating sub-streams in
/// any order (or concurrently) yields the same sequences.
pub fn substream(seed: u64, label: &str, index: u64) -> RandomStream {
    let mut h = fnv1a64(label.as_bytes());
    h ^= splitmix64(seed);
    h = splitmix64(h.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index ^ 0x5bd1_e995)));
    let mut key = [0u8; 32];
    let mut x = h;
    for chunk in key.chunks_exact_mut(8) {
        x = splitmix64(x);
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// FNV-1a hash of arbitrary bytes; used for content-addressed run ids and
/// eval-set ids.
pub fn content_hash(bytes: &[u8]) -> u64 {
    fnv1a64(bytes)
}
