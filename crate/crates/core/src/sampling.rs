//! Seeded sampling for checks that cannot enumerate exhaustively.
//!
//! Every sampler draws from ChaCha8 with an explicit seed so a failing sample can be replayed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x6c32_6c61_6200_0001;

/// The generator behind every sampled check.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` items drawn with replacement from `pool`.
pub fn choose_many<T: Clone>(pool: &[T], count: usize, seed: u64) -> Vec<T> {
    let mut r = rng(seed);
    (0..count).map(|_| pool.choose(&mut r).expect("non-empty pool").clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible() {
        let pool: Vec<u32> = (0..100).collect();
        assert_eq!(choose_many(&pool, 10, 7), choose_many(&pool, 10, 7));
        assert_ne!(choose_many(&pool, 10, 7), choose_many(&pool, 10, 8));
    }
}
