use super::{SearchOrder, ToyError, KEY_MULTIPLIER, ROUND_CONSTANTS, ROUND_ROTATION};
use crate::cost::CostMeter;

pub const MAX_KEY_BITS: u32 = 28;
const ROUNDS: usize = 4;

/// Variable key length 4-round Feistel cipher on 32-bit blocks.
///
/// `ToyCipher::test_mode` runs the same structure on 16-bit blocks so that a
/// permutation can be checked exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyCipher {
    key_bits: u32,
    half_bits: u32,
}

/// Expanded subkeys for one key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundKeys {
    subkeys: [u32; ROUNDS],
    half_bits: u32,
}

impl ToyCipher {
    pub fn new(key_bits: u32) -> Result<Self, ToyError> {
        Self::with_half_bits(key_bits, 16)
    }

    pub fn test_mode(key_bits: u32) -> Result<Self, ToyError> {
        Self::with_half_bits(key_bits, 8)
    }

    fn with_half_bits(key_bits: u32, half_bits: u32) -> Result<Self, ToyError> {
        if !(1..=MAX_KEY_BITS).contains(&key_bits) {
            return Err(ToyError::KeyBits(key_bits));
        }
        Ok(Self { key_bits, half_bits })
    }

    pub fn key_bits(&self) -> u32 {
        self.key_bits
    }

    pub fn block_bits(&self) -> u32 {
        2 * self.half_bits
    }

    pub fn rounds(&self) -> usize {
        ROUNDS
    }

    pub fn key_space(&self) -> u64 {
        1u64 << self.key_bits
    }

    fn check_key(&self, key: u64) -> Result<u32, ToyError> {
        if key >= self.key_space() {
            return Err(ToyError::KeyOutOfRange {
                key,
                bits: self.key_bits,
            });
        }
        Ok(key as u32)
    }

    fn check_block(&self, block: u64) -> Result<u32, ToyError> {
        if block >> self.block_bits() != 0 {
            return Err(ToyError::BlockOutOfRange {
                block,
                bits: self.block_bits(),
            });
        }
        Ok(block as u32)
    }

    pub fn schedule(&self, key: u64) -> Result<RoundKeys, ToyError> {
        Ok(self.schedule_unchecked(self.check_key(key)?))
    }

    /// Key schedule without the range check; the caller guarantees `key < 2^key_bits`.
    #[inline]
    pub fn schedule_unchecked(&self, key: u32) -> RoundKeys {
        let half_mask = half_mask(self.half_bits);
        let mut subkeys = [0u32; ROUNDS];
        for (i, (sk, rc)) in subkeys.iter_mut().zip(ROUND_CONSTANTS).enumerate() {
            let x = (key ^ rc).wrapping_mul(KEY_MULTIPLIER).rotate_left(i as u32);
            *sk = (x ^ (x >> 16)) & half_mask;
        }
        RoundKeys {
            subkeys,
            half_bits: self.half_bits,
        }
    }

    pub fn encrypt(&self, key: u64, block: u64) -> Result<u32, ToyError> {
        let block = self.check_block(block)?;
        Ok(self.schedule(key)?.encrypt(block))
    }

    pub fn decrypt(&self, key: u64, block: u64) -> Result<u32, ToyError> {
        let block = self.check_block(block)?;
        Ok(self.schedule(key)?.decrypt(block))
    }
}

#[inline]
fn half_mask(half_bits: u32) -> u32 {
    (1u32 << half_bits) - 1
}

#[inline]
fn rotl_within(x: u32, r: u32, bits: u32) -> u32 {
    let r = r % bits;
    if r == 0 {
        x
    } else {
        ((x << r) | (x >> (bits - r))) & half_mask(bits)
    }
}

impl RoundKeys {
    #[inline]
    fn round(&self, x: u32, s: u32) -> u32 {
        let mask = half_mask(self.half_bits);
        rotl_within(x.wrapping_add(s) & mask, ROUND_ROTATION, self.half_bits) ^ s
    }

    #[inline]
    pub fn encrypt(&self, block: u32) -> u32 {
        let h = self.half_bits;
        let mask = half_mask(h);
        let (mut l, mut r) = ((block >> h) & mask, block & mask);
        for &s in &self.subkeys {
            let next = l ^ self.round(r, s);
            l = r;
            r = next;
        }
        (l << h) | r
    }

    #[inline]
    pub fn decrypt(&self, block: u32) -> u32 {
        let h = self.half_bits;
        let mask = half_mask(h);
        let (mut l, mut r) = ((block >> h) & mask, block & mask);
        for &s in self.subkeys.iter().rev() {
            let prev = r ^ self.round(l, s);
            r = l;
            l = prev;
        }
        (l << h) | r
    }

    pub fn subkeys(&self) -> [u32; ROUNDS] {
        self.subkeys
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceResult {
    pub key: u32,
    pub keys_tested: u64,
    pub meter: CostMeter,
}

/// Tries keys in a seeded random order and returns the first one consistent
/// with every known pair. Each candidate is charged `per_key_cost` on the meter.
pub fn brute_force_search(
    cipher: &ToyCipher,
    pairs: &[(u32, u32)],
    meter: CostMeter,
    per_key_cost: f64,
    seed: u64,
) -> Result<BruteForceResult, ToyError> {
    if pairs.is_empty() {
        return Err(ToyError::NoPairs);
    }
    for &(p, c) in pairs {
        cipher.check_block(p as u64)?;
        cipher.check_block(c as u64)?;
    }
    let order = SearchOrder::new(cipher.key_bits, seed);
    let mut meter = meter;
    for index in 0..order.len() {
        let key = order.at(index) as u32;
        meter = meter.record_step(per_key_cost)?;
        let rk = cipher.schedule_unchecked(key);
        if pairs.iter().all(|&(p, c)| rk.encrypt(p) == c) {
            return Ok(BruteForceResult {
                key,
                keys_tested: index + 1,
                meter,
            });
        }
    }
    Err(ToyError::Exhausted { tested: order.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let k = rng.random_range(1..=MAX_KEY_BITS);
            let cipher = ToyCipher::new(k).unwrap();
            let key = rng.random_range(0..cipher.key_space());
            let block = rng.random::<u32>() as u64;
            let c = cipher.encrypt(key, block).unwrap();
            assert_eq!(cipher.decrypt(key, c as u64).unwrap() as u64, block);
        }
    }

    #[test]
    fn range_checks() {
        assert_eq!(ToyCipher::new(0), Err(ToyError::KeyBits(0)));
        assert_eq!(ToyCipher::new(29), Err(ToyError::KeyBits(29)));
        let c = ToyCipher::new(8).unwrap();
        assert!(matches!(c.encrypt(256, 0), Err(ToyError::KeyOutOfRange { .. })));
        let t = ToyCipher::test_mode(8).unwrap();
        assert!(matches!(t.encrypt(1, 1 << 16), Err(ToyError::BlockOutOfRange { .. })));
        assert_eq!(t.block_bits(), 16);
    }

    #[test]
    fn one_bit_key_search() {
        let cipher = ToyCipher::new(1).unwrap();
        for secret in 0..2u64 {
            for seed in 0..8 {
                let pairs: Vec<_> = [0x1234_5678u32, 0x9abc_def0]
                    .iter()
                    .map(|&p| (p, cipher.encrypt(secret, p as u64).unwrap()))
                    .collect();
                let r = brute_force_search(&cipher, &pairs, CostMeter::new(), 1.0, seed).unwrap();
                assert_eq!(r.key as u64, secret);
                assert!((1..=2).contains(&r.keys_tested));
            }
        }
    }

    #[test]
    fn ledger_identity() {
        let cipher = ToyCipher::new(12).unwrap();
        let pairs = [(1u32, cipher.encrypt(0xabc, 1).unwrap()), (2, cipher.encrypt(0xabc, 2).unwrap())];
        let r = brute_force_search(&cipher, &pairs, CostMeter::new(), 6720.0, 3).unwrap();
        assert_eq!(r.key, 0xabc);
        assert_eq!(r.meter.accumulated_cost(), r.keys_tested as f64 * 6720.0);
        assert_eq!(r.meter.step_count(), r.keys_tested);
    }

    #[test]
    fn corrupted_pairs_exhaust() {
        let cipher = ToyCipher::new(6).unwrap();
        let real = cipher.encrypt(5, 7).unwrap();
        let pairs = [(7u32, real), (7, real ^ 1)];
        assert_eq!(
            brute_force_search(&cipher, &pairs, CostMeter::new(), 1.0, 0),
            Err(ToyError::Exhausted { tested: 64 })
        );
        assert_eq!(brute_force_search(&cipher, &[], CostMeter::new(), 1.0, 0), Err(ToyError::NoPairs));
    }
}
