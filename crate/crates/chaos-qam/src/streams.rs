//! Deterministic derivation of independent random-number streams.
//!
//! Monte Carlo runs fan out over (control parameter, Eb/N0 point, frame
//! index) and must be reproducible regardless of how that work is scheduled.
//! Instead of sharing one sequential generator, every unit of work gets its
//! own stream whose seed is a hash of the master seed and the coordinates
//! that identify the unit:
//!
//! ```
//! use chaos_qam::streams::{derive_seed, stream};
//!
//! let master = 42;
//! let seed = derive_seed(master, &[1, 0.5f64.to_bits(), 7]);
//! let mut rng = stream(seed);
//! # use rand::Rng;
//! let _: f64 = rng.gen();
//! ```
//!
//! The mixer is the 64-bit finalizer from splitmix64 — a bijection with full
//! avalanche — folded over the word list, so distinct word lists give
//! statistically unrelated seeds and every list yields the same seed on
//! every platform and run. This is a stream-separation device, not a
//! cryptographic construction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer: bijective 64-bit mixing with full avalanche.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a stream seed from a master seed and the words identifying one
/// unit of work (role tags, `f64::to_bits` of parameters, frame counters).
///
/// Deterministic; sensitive to word order and word count.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    // Offset the chain per position so permuted word lists diverge even
    // when the words themselves collide after mixing.
    let mut h = mix64(master ^ 0x9e37_79b9_7f4a_7c15);
    for (k, &w) in words.iter().enumerate() {
        h = mix64(h ^ mix64(w.wrapping_add(k as u64 + 1)));
    }
    h
}

/// Instantiates the generator for a derived seed.
///
/// ChaCha with 8 rounds: fast, high-quality, identical output on every
/// platform (no architecture-dependent paths).
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashSet;

    #[test]
    fn derivation_is_deterministic() {
        let a = derive_seed(42, &[1, 2, 3]);
        let b = derive_seed(42, &[1, 2, 3]);
        assert_eq!(a, b);
        let mut r1 = stream(a);
        let mut r2 = stream(b);
        for _ in 0..100 {
            assert_eq!(r1.gen::<u64>(), r2.gen::<u64>());
        }
    }

    #[test]
    fn seeds_separate_by_master_words_order_and_length() {
        let base = derive_seed(42, &[1, 2, 3]);
        assert_ne!(base, derive_seed(43, &[1, 2, 3]), "master");
        assert_ne!(base, derive_seed(42, &[1, 2, 4]), "word value");
        assert_ne!(base, derive_seed(42, &[1, 3, 2]), "word order");
        assert_ne!(base, derive_seed(42, &[1, 2, 3, 0]), "word count");
        assert_ne!(base, derive_seed(42, &[1, 2]), "word count");
    }

    #[test]
    fn no_collisions_over_a_large_coordinate_grid() {
        let mut seen = HashSet::new();
        for role in 0..2u64 {
            for point in 0..50u64 {
                for frame in 0..500u64 {
                    let s = derive_seed(42, &[role, point, frame]);
                    assert!(seen.insert(s), "collision at ({role},{point},{frame})");
                }
            }
        }
    }

    #[test]
    fn mix64_is_not_the_identity_and_spreads_low_bits() {
        // Consecutive inputs must land far apart: count differing bits.
        for z in 0..100u64 {
            let d = (mix64(z) ^ mix64(z + 1)).count_ones();
            assert!(d >= 10, "weak avalanche: {d} bits differ at z={z}");
        }
    }

    #[test]
    fn f64_parameter_bits_distinguish_streams() {
        let a = derive_seed(7, &[0.1f64.to_bits()]);
        let b = derive_seed(7, &[0.5f64.to_bits()]);
        let c = derive_seed(7, &[1.0f64.to_bits()]);
        assert!(a != b && b != c && a != c);
    }
}
