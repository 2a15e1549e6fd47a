use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded visiting order over `0..2^bits`.
///
/// `i -> (i * multiplier + offset) mod 2^bits` with an odd multiplier is a
/// permutation, so every candidate is visited exactly once. Because the offset
/// is uniform, a fixed target lands at a uniform position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOrder {
    bits: u32,
    multiplier: u64,
    offset: u64,
}

impl SearchOrder {
    pub fn new(bits: u32, seed: u64) -> Self {
        assert!(bits <= 63, "search space too large");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = Self::mask_for(bits);
        Self {
            bits,
            multiplier: (rng.random::<u64>() & mask) | 1,
            offset: rng.random::<u64>() & mask,
        }
    }

    /// Plain ascending order.
    pub fn sequential(bits: u32) -> Self {
        Self {
            bits,
            multiplier: 1,
            offset: 0,
        }
    }

    fn mask_for(bits: u32) -> u64 {
        if bits == 0 {
            0
        } else {
            u64::MAX >> (64 - bits)
        }
    }

    pub fn len(&self) -> u64 {
        1u64 << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn at(&self, index: u64) -> u64 {
        index.wrapping_mul(self.multiplier).wrapping_add(self.offset) & Self::mask_for(self.bits)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len()).map(move |i| self.at(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_a_permutation() {
        for bits in [0, 1, 5, 12] {
            for seed in 0..4 {
                let order = SearchOrder::new(bits, seed);
                let mut seen = vec![false; order.len() as usize];
                for v in order.iter() {
                    assert!(!seen[v as usize]);
                    seen[v as usize] = true;
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn seeds_differ() {
        let a: Vec<_> = SearchOrder::new(16, 1).iter().take(8).collect();
        let b: Vec<_> = SearchOrder::new(16, 2).iter().take(8).collect();
        assert_ne!(a, b);
        assert_eq!(SearchOrder::sequential(3).iter().collect::<Vec<_>>(), (0..8).collect::<Vec<_>>());
    }
}
