//! Seeded random streams.
//!
//! Every realization owns one master seed. Independent consumers (scenario
//! layout, fading, initial state, agent exploration) draw from separate
//! ChaCha streams so that adding draws in one place never shifts another.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stream ids for the consumers inside one realization.
pub mod streams {
    pub const SCENARIO: u64 = 0;
    pub const CHANNELS: u64 = 1;
    pub const INIT: u64 = 2;
    pub const AGENT: u64 = 3;
    /// Reserved for Monte Carlo seed derivation.
    pub const REALIZATIONS: u64 = 0xC0FFEE;
}

/// Generator for `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed of realization `index` under a master seed.
pub fn realization_seed(master: u64, index: u64) -> u64 {
    let mut rng = stream(master, streams::REALIZATIONS);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(7, 0).random();
        let b: u64 = stream(7, 0).random();
        let c: u64 = stream(7, 1).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn realization_seeds_differ() {
        let s: std::vec::Vec<u64> = (0..50).map(|i| realization_seed(3, i)).collect();
        for i in 0..s.len() {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(realization_seed(3, 4), realization_seed(3, 4));
    }
}
