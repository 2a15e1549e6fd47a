//! Closed-form cost and time estimates for key search, dictionary lookup and
//! PRNG state recovery.
//!
//! All costs are byte-steps; all times are seconds. A uniform key search tests
//! half the keyspace on average, so every estimate carries a worst case of twice
//! the expected time.

use thiserror::Error;

use crate::device::ByteStepRate;

/// Byte-steps per key bit of an EFF-style DES search unit.
pub const DES_BYTES_PER_KEY_BIT: f64 = 120.0;
/// Three chained encryptions per key test.
pub const TRIPLE_DES_BYTES_PER_KEY_BIT: f64 = 360.0;
/// Historical growth of device information per year (2.6 dB/year).
pub const ANNUAL_PROGRESS_FACTOR: f64 = 1.82;
pub const DEFAULT_SCAN_RATE_WORDS_PER_S: f64 = 1e9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("key length must be at least one bit")]
    ZeroKeyBits,
    #[error("word size must be at least one bit")]
    ZeroWordBits,
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("epsilon ({epsilon}) must be smaller than the key length ({key_bits})")]
    EpsilonTooLarge { epsilon: u32, key_bits: u32 },
    #[error("speedup must be >= 1, got {0}")]
    SpeedupBelowOne(f64),
    #[error("annual progress factor must be > 1, got {0}")]
    NoProgress(f64),
    #[error("fleet delivers no byte-steps")]
    ZeroRate,
}

fn positive(name: &'static str, value: f64) -> Result<f64, EstimateError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(EstimateError::NonPositive { name, value })
    }
}

/// Per-key cost of the EFF search unit: 24 units shared a ~10,000 transistor chip
/// and each needed 16 cycles per key. Returns (bytes per key, bytes per key bit).
pub fn eff_search_unit_cost() -> (f64, f64) {
    let transistors_per_unit = 1e4 / 24.0;
    let per_key = transistors_per_unit * 16.0;
    (per_key, per_key / 56.0)
}

/// Brute-force search where testing one key costs `bytes_per_key_bit * key_bits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceModel {
    bytes_per_key_bit: f64,
    key_bits: u32,
}

impl BruteForceModel {
    pub fn new(key_bits: u32) -> Result<Self, EstimateError> {
        Self::with_cost(key_bits, DES_BYTES_PER_KEY_BIT)
    }

    pub fn with_cost(key_bits: u32, bytes_per_key_bit: f64) -> Result<Self, EstimateError> {
        if key_bits == 0 {
            return Err(EstimateError::ZeroKeyBits);
        }
        positive("bytes_per_key_bit", bytes_per_key_bit)?;
        Ok(Self {
            bytes_per_key_bit,
            key_bits,
        })
    }

    pub fn triple_des(key_bits: u32) -> Result<Self, EstimateError> {
        Self::with_cost(key_bits, TRIPLE_DES_BYTES_PER_KEY_BIT)
    }

    pub fn key_bits(&self) -> u32 {
        self.key_bits
    }

    pub fn bytes_per_key_bit(&self) -> f64 {
        self.bytes_per_key_bit
    }

    pub fn cost_per_key(&self) -> f64 {
        self.bytes_per_key_bit * self.key_bits as f64
    }

    /// Expected cost: `bytes_per_key_bit * k * 2^(k-1)`.
    pub fn expected_cost(&self) -> f64 {
        self.cost_per_key() * 2f64.powi(self.key_bits as i32 - 1)
    }
}

pub fn brute_force_cost(model: &BruteForceModel) -> f64 {
    model.expected_cost()
}

pub fn triple_des_cost(key_bits: u32) -> Result<f64, EstimateError> {
    Ok(BruteForceModel::triple_des(key_bits)?.expected_cost())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackEstimate {
    pub total_cost: f64,
    pub fleet_rate: f64,
    pub expected_seconds: f64,
    pub worst_case_seconds: f64,
}

/// Time for a fleet to burn through `cost` byte-steps.
pub fn break_time<R: ByteStepRate + ?Sized>(cost: f64, fleet: &R) -> Result<AttackEstimate, EstimateError> {
    positive("cost", cost)?;
    let rate = fleet.byte_steps_per_second();
    if !(rate.is_finite() && rate > 0.0) {
        return Err(EstimateError::ZeroRate);
    }
    let expected_seconds = cost / rate;
    Ok(AttackEstimate {
        total_cost: cost,
        fleet_rate: rate,
        expected_seconds,
        worst_case_seconds: 2.0 * expected_seconds,
    })
}

/// Years of hardware progress needed for a given speedup at `annual_factor` per year.
pub fn progress_years(speedup_needed: f64, annual_factor: f64) -> Result<f64, EstimateError> {
    if !speedup_needed.is_finite() || speedup_needed < 1.0 {
        return Err(EstimateError::SpeedupBelowOne(speedup_needed));
    }
    if !annual_factor.is_finite() || annual_factor <= 1.0 {
        return Err(EstimateError::NoProgress(annual_factor));
    }
    Ok(speedup_needed.ln() / annual_factor.ln())
}

/// Converts a decibel-per-year growth rate into a yearly multiplication factor.
pub fn annual_factor_from_db(db_per_year: f64) -> f64 {
    10f64.powf(db_per_year / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComparisonBound {
    /// `k - epsilon` comparisons per lookup.
    #[default]
    Conservative,
    /// `plaintext_blocks * k * (k - epsilon)` comparisons, the published upper bound.
    UpperBound,
}

/// Sorted dictionary of (ciphertext, key) pairs covering `2^-epsilon` of the keyspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DictionaryModel {
    key_bits: u32,
    epsilon: u32,
    plaintext_blocks: u32,
    steps_per_comparison: u32,
    bound: ComparisonBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DictionaryStats {
    pub entries: f64,
    pub dictionary_bits: f64,
    pub dictionary_bytes: f64,
    pub expected_comparisons: f64,
    pub steps_per_lookup: f64,
    /// Every step is charged the whole stored dictionary (leased, never idle).
    pub lookup_cost: f64,
    pub per_key_cost: f64,
    /// Building the table is priced like a full brute-force search at 120 B/bit.
    /// That constant is an assumption, not a measurement.
    pub construction_cost: f64,
}

impl DictionaryModel {
    pub fn new(key_bits: u32, epsilon: u32) -> Result<Self, EstimateError> {
        if key_bits == 0 {
            return Err(EstimateError::ZeroKeyBits);
        }
        if epsilon >= key_bits {
            return Err(EstimateError::EpsilonTooLarge { epsilon, key_bits });
        }
        Ok(Self {
            key_bits,
            epsilon,
            plaintext_blocks: 3,
            steps_per_comparison: 2,
            bound: ComparisonBound::Conservative,
        })
    }

    pub fn with_plaintext_blocks(mut self, blocks: u32) -> Result<Self, EstimateError> {
        positive("plaintext_blocks", blocks as f64)?;
        self.plaintext_blocks = blocks;
        Ok(self)
    }

    pub fn with_steps_per_comparison(mut self, steps: u32) -> Result<Self, EstimateError> {
        positive("steps_per_comparison", steps as f64)?;
        self.steps_per_comparison = steps;
        Ok(self)
    }

    pub fn with_bound(mut self, bound: ComparisonBound) -> Self {
        self.bound = bound;
        self
    }

    pub fn key_bits(&self) -> u32 {
        self.key_bits
    }

    pub fn epsilon(&self) -> u32 {
        self.epsilon
    }

    /// Bits per stored entry: the ciphertext of the fixed plaintext plus the key.
    pub fn entry_bits(&self) -> f64 {
        (self.plaintext_blocks as f64 + 1.0) * self.key_bits as f64
    }
}

pub fn dictionary_stats(model: &DictionaryModel) -> DictionaryStats {
    let k = model.key_bits as f64;
    let remaining_bits = (model.key_bits - model.epsilon) as f64;
    let entries = 2f64.powf(remaining_bits);
    let dictionary_bits = model.entry_bits() * entries;
    let dictionary_bytes = dictionary_bits / 8.0;
    let expected_comparisons = match model.bound {
        ComparisonBound::Conservative => remaining_bits,
        ComparisonBound::UpperBound => model.plaintext_blocks as f64 * k * remaining_bits,
    };
    let steps_per_lookup = model.steps_per_comparison as f64 * expected_comparisons;
    let lookup_cost = steps_per_lookup * dictionary_bytes;
    let per_key_cost = 2f64.powi(model.epsilon as i32) * lookup_cost;
    let construction_cost = DES_BYTES_PER_KEY_BIT * k * 2f64.powi(model.key_bits as i32 - 1);
    DictionaryStats {
        entries,
        dictionary_bits,
        dictionary_bytes,
        expected_comparisons,
        steps_per_lookup,
        lookup_cost,
        per_key_cost,
        construction_cost,
    }
}

/// Internal-state search against a TF-1 style generator with `4w` bits of state
/// whose effective strength drops to `1.5w` bits once a zero output word is seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tf1Model {
    word_bits: u32,
    ops_per_state_check: u32,
    bytes_per_strength_bit: f64,
    scan_rate_words_per_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tf1Estimate {
    pub strength_bits: f64,
    pub intended_strength_bits: f64,
    pub state_bits: u32,
    /// `ops_per_state_check * 2^(1.5w)`.
    pub elementary_operations: f64,
    pub state_search_cost: f64,
    pub expected_state_search_seconds: f64,
    /// Average number of output words before the first zero word: `2^(w-1)`.
    pub expected_scan_words: f64,
    /// Mean of the geometric waiting time, `2^w`, reported alongside.
    pub geometric_scan_words: f64,
    pub expected_scan_seconds: f64,
}

impl Tf1Model {
    pub fn new(word_bits: u32) -> Result<Self, EstimateError> {
        if word_bits == 0 {
            return Err(EstimateError::ZeroWordBits);
        }
        Ok(Self {
            word_bits,
            ops_per_state_check: 16,
            bytes_per_strength_bit: DES_BYTES_PER_KEY_BIT,
            scan_rate_words_per_s: DEFAULT_SCAN_RATE_WORDS_PER_S,
        })
    }

    pub fn with_ops_per_state_check(mut self, ops: u32) -> Result<Self, EstimateError> {
        positive("ops_per_state_check", ops as f64)?;
        self.ops_per_state_check = ops;
        Ok(self)
    }

    pub fn with_bytes_per_strength_bit(mut self, bytes: f64) -> Result<Self, EstimateError> {
        self.bytes_per_strength_bit = positive("bytes_per_strength_bit", bytes)?;
        Ok(self)
    }

    pub fn with_scan_rate(mut self, words_per_s: f64) -> Result<Self, EstimateError> {
        self.scan_rate_words_per_s = positive("scan_rate_words_per_s", words_per_s)?;
        Ok(self)
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    /// 1.5w; not necessarily an integer for odd w.
    pub fn strength_bits(&self) -> f64 {
        1.5 * self.word_bits as f64
    }
}

pub fn tf1_estimate<R: ByteStepRate + ?Sized>(model: &Tf1Model, fleet: &R) -> Result<Tf1Estimate, EstimateError> {
    let w = model.word_bits as f64;
    let strength_bits = model.strength_bits();
    let state_search_cost = model.bytes_per_strength_bit * strength_bits * 2f64.powf(strength_bits - 1.0);
    let estimate = break_time(state_search_cost, fleet)?;
    let expected_scan_words = 2f64.powf(w - 1.0);
    Ok(Tf1Estimate {
        strength_bits,
        intended_strength_bits: 2.0 * w,
        state_bits: 4 * model.word_bits,
        elementary_operations: model.ops_per_state_check as f64 * 2f64.powf(strength_bits),
        state_search_cost,
        expected_state_search_seconds: estimate.expected_seconds,
        expected_scan_words,
        geometric_scan_words: 2f64.powf(w),
        expected_scan_seconds: expected_scan_words / model.scan_rate_words_per_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{default_catalog, find_device, names, Fleet, Rate};
    use crate::time::{DAY, HOUR, MONTH, YEAR};
    use proptest::prelude::*;

    fn radeon() -> Fleet {
        Fleet::single(find_device(&default_catalog(), names::RADEON_5870).unwrap().clone())
    }

    fn cluster() -> Fleet {
        Fleet::new(radeon().device().clone(), 65_536).unwrap()
    }

    fn within(actual: f64, expected: f64, tol: f64) -> bool {
        ((actual - expected) / expected).abs() <= tol
    }

    #[test]
    fn des_56_on_one_gpu() {
        let cost = brute_force_cost(&BruteForceModel::new(56).unwrap());
        assert!(within(cost, 2.421e20, 1e-3));
        let t = break_time(cost, &radeon()).unwrap();
        assert!(within(t.expected_seconds, 132.5, 1e-3), "{}", t.expected_seconds);
        assert_eq!(t.worst_case_seconds, 2.0 * t.expected_seconds);
    }

    #[test]
    fn des_64_on_one_gpu() {
        let t = break_time(brute_force_cost(&BruteForceModel::new(64).unwrap()), &radeon()).unwrap();
        assert!(within(t.expected_seconds, 38_760.0, 1e-3));
        assert!(within(t.expected_seconds / HOUR, 10.77, 1e-2));
    }

    #[test]
    fn one_bit_key() {
        assert_eq!(brute_force_cost(&BruteForceModel::new(1).unwrap()), 120.0);
        assert_eq!(triple_des_cost(1).unwrap(), 360.0);
        assert_eq!(BruteForceModel::new(0), Err(EstimateError::ZeroKeyBits));
    }

    #[test]
    fn cluster_times() {
        let t84 = break_time(brute_force_cost(&BruteForceModel::new(84).unwrap()), &cluster()).unwrap();
        assert!(within(t84.expected_seconds / DAY, 9.42, 1e-2));
        let t96 = break_time(brute_force_cost(&BruteForceModel::new(96).unwrap()), &cluster()).unwrap();
        assert!(within(t96.expected_seconds / YEAR, 120.8, 1e-3));
        assert!(within(t96.worst_case_seconds / YEAR, 241.7, 1e-3));
        let tianhe = break_time(brute_force_cost(&BruteForceModel::new(84).unwrap()), &Rate(1.3e22)).unwrap();
        assert!(within(tianhe.expected_seconds / DAY, 87.0, 0.01));
    }

    #[test]
    fn triple_des() {
        let t = break_time(triple_des_cost(80).unwrap(), &cluster()).unwrap();
        assert!(within(t.expected_seconds / DAY, 1.68, 0.01));
        assert_eq!(
            triple_des_cost(56).unwrap(),
            3.0 * brute_force_cost(&BruteForceModel::new(56).unwrap())
        );
    }

    #[test]
    fn progress() {
        assert!((progress_years(60.0, ANNUAL_PROGRESS_FACTOR).unwrap() - 6.837).abs() < 0.01);
        assert_eq!(progress_years(1.0, ANNUAL_PROGRESS_FACTOR).unwrap(), 0.0);
        assert!((progress_years(1.82, 1.82).unwrap() - 1.0).abs() < 1e-12);
        assert!(progress_years(0.5, 1.82).is_err());
        assert!(progress_years(2.0, 1.0).is_err());
        assert!((annual_factor_from_db(2.6) - ANNUAL_PROGRESS_FACTOR).abs() < 0.002);
    }

    #[test]
    fn eff_unit_matches_120_bytes_per_bit() {
        let (per_key, per_bit) = eff_search_unit_cost();
        assert!(within(per_key, 6_700.0, 0.005));
        assert!(within(DES_BYTES_PER_KEY_BIT * 56.0, 6_700.0, 0.005));
        assert!((per_bit - 120.0).abs() < 1.0);
    }

    #[test]
    fn dictionary_56_6() {
        let s = dictionary_stats(&DictionaryModel::new(56, 6).unwrap());
        assert!(within(s.dictionary_bits, 2.5e17, 0.01));
        assert!(within(s.dictionary_bytes, 3.1e16, 0.02));
        assert_eq!(s.expected_comparisons, 50.0);
        assert_eq!(s.steps_per_lookup, 100.0);
        assert!(within(s.lookup_cost, 3.1e18, 0.02));
        assert!(within(s.per_key_cost, 2e20, 0.05));
    }

    #[test]
    fn dictionary_full_coverage_and_bounds() {
        let s = dictionary_stats(&DictionaryModel::new(20, 0).unwrap());
        assert_eq!(s.per_key_cost, s.lookup_cost);
        let upper = dictionary_stats(&DictionaryModel::new(56, 6).unwrap().with_bound(ComparisonBound::UpperBound));
        assert_eq!(upper.expected_comparisons, 3.0 * 56.0 * 50.0);
        assert!(DictionaryModel::new(8, 8).is_err());
    }

    #[test]
    fn tf1_rows() {
        let one = radeon();
        let w32 = tf1_estimate(&Tf1Model::new(32).unwrap(), &one).unwrap();
        assert!(within(w32.expected_state_search_seconds, 0.443583, 1e-4));
        assert!(within(w32.expected_scan_words, 2.1e9, 0.03));
        assert_eq!(w32.strength_bits, 48.0);
        assert_eq!(w32.state_bits, 128);

        let w60 = tf1_estimate(&Tf1Model::new(60).unwrap(), &cluster()).unwrap();
        assert!(within(w60.expected_state_search_seconds / YEAR, 1.7699, 1e-3));

        let w48 = tf1_estimate(&Tf1Model::new(48).unwrap(), &one).unwrap();
        assert!(within(w48.expected_scan_seconds / HOUR, 39.1, 0.01));
        assert!(within(w48.expected_state_search_seconds / MONTH, 4.236, 1e-3));

        let odd = tf1_estimate(&Tf1Model::new(7).unwrap(), &one).unwrap();
        assert_eq!(odd.strength_bits, 10.5);
    }

    proptest! {
        #[test]
        fn brute_force_ratio(k in 1u32..900) {
            let a = brute_force_cost(&BruteForceModel::new(k).unwrap());
            let b = brute_force_cost(&BruteForceModel::new(k + 1).unwrap());
            let ratio = b / a;
            let expected = 2.0 * (k as f64 + 1.0) / k as f64;
            prop_assert!((ratio - expected).abs() <= 1e-12 * expected);
            prop_assert!(b > a);
        }

        #[test]
        fn doubling_the_fleet_halves_the_time(units in 1u64..1_000_000, k in 1u32..120) {
            let d = radeon().device().clone();
            let cost = brute_force_cost(&BruteForceModel::new(k).unwrap());
            let a = break_time(cost, &Fleet::new(d.clone(), units).unwrap()).unwrap();
            let b = break_time(cost, &Fleet::new(d, units * 2).unwrap()).unwrap();
            prop_assert!((a.expected_seconds / b.expected_seconds - 2.0).abs() < 1e-12);
        }

        #[test]
        fn dictionary_identities(k in 2u32..200, eps_frac in 0.0f64..1.0) {
            let eps = ((k - 1) as f64 * eps_frac) as u32;
            let s = dictionary_stats(&DictionaryModel::new(k, eps).unwrap());
            prop_assert_eq!(s.dictionary_bytes, s.dictionary_bits / 8.0);
            let back = s.per_key_cost * 2f64.powi(-(eps as i32));
            prop_assert!((back - s.lookup_cost).abs() <= 1e-12 * s.lookup_cost);
        }

        #[test]
        fn tf1_monotone(w in 1u32..120) {
            let one = radeon();
            let a = tf1_estimate(&Tf1Model::new(w).unwrap(), &one).unwrap();
            let b = tf1_estimate(&Tf1Model::new(w + 1).unwrap(), &one).unwrap();
            prop_assert!(b.state_search_cost > a.state_search_cost);
            prop_assert!(b.expected_scan_words > a.expected_scan_words);
        }
    }
}
