use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ToyError;

/// Source of one-time-pad bits.
pub trait KeystreamSource {
    /// Restarts the stream from `seed`.
    fn reseed(&mut self, seed: u64);

    fn next_bit(&mut self) -> bool;

    /// Fills `buf` most significant bit first.
    fn fill_bytes(&mut self, buf: &mut [u8]) {
        for byte in buf.iter_mut() {
            let mut b = 0u8;
            for _ in 0..8 {
                b = (b << 1) | self.next_bit() as u8;
            }
            *byte = b;
        }
    }
}

/// Seeded bit generator emitting ones with probability `bias`.
#[derive(Debug, Clone)]
pub struct KeystreamGen {
    bias: f64,
    seed: u64,
    rng: ChaCha8Rng,
}

impl KeystreamGen {
    pub fn new(bias: f64, seed: u64) -> Result<Self, ToyError> {
        if !(0.0..=1.0).contains(&bias) {
            return Err(ToyError::Bias(bias));
        }
        Ok(Self {
            bias,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn unbiased(seed: u64) -> Self {
        Self::new(0.5, seed).expect("0.5 is a valid bias")
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fraction of ones in the next `n` bits.
    pub fn ones_fraction(&mut self, n: u64) -> f64 {
        let ones = (0..n).filter(|_| self.next_bit()).count();
        ones as f64 / n as f64
    }
}

impl KeystreamSource for KeystreamGen {
    fn reseed(&mut self, seed: u64) {
        self.seed = seed;
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    #[inline]
    fn next_bit(&mut self) -> bool {
        self.rng.random::<f64>() < self.bias
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_from_seed() {
        let mut a = KeystreamGen::new(0.6, 9).unwrap();
        let mut b = KeystreamGen::new(0.6, 9).unwrap();
        let (mut x, mut y) = ([0u8; 64], [0u8; 64]);
        a.fill_bytes(&mut x);
        b.fill_bytes(&mut y);
        assert_eq!(x, y);
        a.reseed(9);
        a.fill_bytes(&mut y);
        assert_eq!(x, y);
    }

    #[test]
    fn empirical_bias() {
        for p in [0.5, 0.6] {
            let f = KeystreamGen::new(p, 42).unwrap().ones_fraction(1_000_000);
            assert!((f - p).abs() < 0.002, "p={p} measured {f}");
        }
    }

    #[test]
    fn degenerate_biases() {
        let mut ones = KeystreamGen::new(1.0, 1).unwrap();
        let mut buf = [0u8; 16];
        ones.fill_bytes(&mut buf);
        assert!(buf.iter().all(|&b| b == 0xff));
        let mut zeros = KeystreamGen::new(0.0, 1).unwrap();
        zeros.fill_bytes(&mut buf);
        assert!(buf.iter().all(|&b| b == 0));
        assert!(KeystreamGen::new(1.1, 0).is_err());
        assert!(KeystreamGen::new(f64::NAN, 0).is_err());
    }
}
