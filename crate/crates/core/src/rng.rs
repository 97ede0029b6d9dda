//! Deterministic stream derivation.
//!
//! All randomness in the pipeline flows from one root seed. Independent
//! streams are derived from (seed, purpose, index) so that frames can be
//! generated in parallel while staying bit-identical to a serial run.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; stable across platforms.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives an independent ChaCha stream for (seed, purpose, index).
pub fn derive(seed: u64, purpose: &str, index: u64) -> ChaCha8Rng {
    let tag = fnv1a(purpose.as_bytes());
    let mut key = [0u8; 32];
    let words = [
        mix(seed ^ tag),
        mix(seed.wrapping_add(0x517c_c1b7_2722_0a95) ^ index),
        mix(tag ^ index.rotate_left(23)),
        mix(seed ^ tag ^ index ^ 0x2545_f491_4f6c_dd1d),
    ];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
