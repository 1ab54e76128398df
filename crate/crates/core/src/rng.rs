//! Deterministic random number generation.
//!
//! Every stochastic step in the crate draws from a ChaCha8 stream seeded by a
//! 64-bit value. Independent stages derive their own seeds from a parent seed
//! plus a label, so adding a stage never perturbs the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Builds the canonical generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a child seed from a parent seed, a stage label, and an index.
///
/// FNV-1a over the label bytes and the two integers. Stable across platforms;
/// distinct labels give unrelated streams.
pub fn derive_seed(parent: u64, label: &str, index: u64) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut absorb = |byte: u8| {
        h ^= u64::from(byte);
        h = h.wrapping_mul(PRIME);
    };
    for b in parent.to_le_bytes() {
        absorb(b);
    }
    for b in label.as_bytes() {
        absorb(*b);
    }
    for b in index.to_le_bytes() {
        absorb(b);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derived_seeds_are_stable_and_distinct() {
        let a = derive_seed(7, "sample", 1);
        assert_eq!(a, derive_seed(7, "sample", 1));
        assert_ne!(a, derive_seed(7, "sample", 2));
        assert_ne!(a, derive_seed(7, "learner", 1));
        assert_ne!(a, derive_seed(8, "sample", 1));
    }

    #[test]
    fn generator_reproduces_stream() {
        let mut a = rng_from_seed(42);
        let mut b = rng_from_seed(42);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
