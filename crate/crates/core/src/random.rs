//! Seedable, reproducible random source.

use rand::seq::{index, SliceRandom};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic random stream: the same seed always yields the same draws.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn bit(&mut self) -> bool {
        self.rng.random()
    }

    /// Uniform integer in `[0, m)`. `m` must be positive.
    #[inline]
    pub fn below(&mut self, m: usize) -> usize {
        self.rng.random_range(0..m)
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        self.rng.random()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// `amount` distinct indices from `[0, len)`, uniformly at random.
    pub fn distinct(&mut self, len: usize, amount: usize) -> Vec<usize> {
        index::sample(&mut self.rng, len, amount).into_vec()
    }

    /// Moves `amount` uniformly chosen, distinct elements of `items` to its
    /// front in random order and returns them. Cost is linear in `amount`.
    pub fn choose_front<'a, T>(&mut self, items: &'a mut [T], amount: usize) -> &'a mut [T] {
        items.partial_shuffle(&mut self.rng, amount).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
            assert_eq!(a.below(17), b.below(17));
            assert_eq!(a.unit().to_bits(), b.unit().to_bits());
        }
        assert_ne!(RandomSource::new(1).next_u64(), RandomSource::new(2).next_u64());
    }

    #[test]
    fn distinct_indices() {
        let mut r = RandomSource::new(7);
        for _ in 0..50 {
            let mut v = r.distinct(20, 8);
            assert!(v.iter().all(|&i| i < 20));
            v.sort_unstable();
            v.dedup();
            assert_eq!(v.len(), 8);
        }
    }
}
