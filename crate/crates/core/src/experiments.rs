//! Desk-scale experiments checking the closed-form cost shapes against
//! metered runs of the toy primitives. Trials run in parallel; every trial
//! derives its randomness from `(seed, trial index)` so results do not depend
//! on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cost::CostMeter;
use crate::toy::{
    brute_force_search, scan_for_zero, state_search, KeystreamGen, PrngState, StandInPrng, StateSearchProblem,
    ToyCipher, ToyError,
};

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceMean {
    pub key_bits: u32,
    pub trials: u64,
    pub mean_keys_tested: f64,
    /// `2^(k-1)`.
    pub expected: f64,
    /// Every trial's meter equalled `keys_tested * per_key_cost`.
    pub ledger_exact: bool,
}

impl BruteForceMean {
    pub fn relative_error(&self) -> f64 {
        self.mean_keys_tested / self.expected - 1.0
    }
}

/// Random secret key and two random known pairs per trial.
pub fn brute_force_mean(key_bits: u32, trials: u64, per_key_cost: f64, seed: u64) -> Result<BruteForceMean, ToyError> {
    let cipher = ToyCipher::new(key_bits)?;
    let results: Vec<(u64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let secret = rng.random_range(0..cipher.key_space());
            let pairs: Vec<(u32, u32)> = (0..2)
                .map(|_| {
                    let p = rng.random::<u32>();
                    Ok((p, cipher.encrypt(secret, p as u64)?))
                })
                .collect::<Result<_, ToyError>>()?;
            let r = brute_force_search(&cipher, &pairs, CostMeter::new(), per_key_cost, rng.random())?;
            let exact = r.meter.accumulated_cost() == r.keys_tested as f64 * per_key_cost
                && r.meter.step_count() == r.keys_tested;
            Ok((r.keys_tested, exact))
        })
        .collect::<Result<_, ToyError>>()?;
    let total: u64 = results.iter().map(|r| r.0).sum();
    Ok(BruteForceMean {
        key_bits,
        trials,
        mean_keys_tested: total as f64 / trials as f64,
        expected: 2f64.powi(key_bits as i32 - 1),
        ledger_exact: results.iter().all(|r| r.1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMean {
    pub word_bits: u32,
    pub starts: u64,
    /// Starts that sat on a zero-free cycle and were left out of the mean.
    pub zero_free: u64,
    pub mean_words: f64,
    /// `2^w`, the mean wait for a uniformly random word to be zero.
    pub geometric_expectation: f64,
    /// `2^(w-1)`, the convention used in the published table.
    pub table_convention: f64,
}

fn scan_summary(word_bits: u32, outcomes: &[Option<u64>]) -> ScanMean {
    let found: Vec<u64> = outcomes.iter().flatten().copied().collect();
    ScanMean {
        word_bits,
        starts: outcomes.len() as u64,
        zero_free: (outcomes.len() - found.len()) as u64,
        mean_words: found.iter().sum::<u64>() as f64 / found.len().max(1) as f64,
        geometric_expectation: 2f64.powi(word_bits as i32),
        table_convention: 2f64.powi(word_bits as i32 - 1),
    }
}

pub fn scan_mean(word_bits: u32, starts: u64, seed: u64) -> Result<ScanMean, ToyError> {
    StandInPrng::new(word_bits, PrngState::new(0, 0, 0, 0))?;
    let mask = (1u64 << word_bits) - 1;
    let outcomes: Vec<Option<u64>> = (0..starts)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut w = || rng.random::<u64>() & mask;
            let state = PrngState::new(w(), w(), w(), w());
            scan_for_zero(&mut StandInPrng::new(word_bits, state).expect("masked state")).ok()
        })
        .collect();
    Ok(scan_summary(word_bits, &outcomes))
}

/// Mean over every one of the `2^(4w)` start states.
pub fn exhaustive_scan_mean(word_bits: u32) -> Result<ScanMean, ToyError> {
    if word_bits > 5 {
        return Err(ToyError::WordBits(word_bits));
    }
    StandInPrng::new(word_bits, PrngState::new(0, 0, 0, 0))?;
    let outcomes: Vec<Option<u64>> = (0..1u64 << (4 * word_bits))
        .map(|bits| {
            let state = PrngState::unpack(bits, word_bits);
            scan_for_zero(&mut StandInPrng::new(word_bits, state).expect("unpacked state")).ok()
        })
        .collect();
    Ok(scan_summary(word_bits, &outcomes))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSearchMean {
    pub word_bits: u32,
    pub unknown_bits: u32,
    pub trials: u64,
    pub mean_candidates: f64,
    pub mean_cost: f64,
    /// `2^(unknown_bits - 1)`.
    pub expected_candidates: f64,
    pub ledger_exact: bool,
}

impl StateSearchMean {
    pub fn relative_error(&self) -> f64 {
        self.mean_candidates / self.expected_candidates - 1.0
    }
}

/// Each trial draws a start state, scans to the first zero word, observes the
/// next `window` outputs and recovers the state.
pub fn state_search_mean(
    word_bits: u32,
    trials: u64,
    checker_ops: u32,
    per_op_information: f64,
    seed: u64,
) -> Result<StateSearchMean, ToyError> {
    StandInPrng::new(word_bits, PrngState::new(0, 0, 0, 0))?;
    let mask = (1u64 << word_bits) - 1;
    let window = 16;
    let per_candidate = checker_ops as f64 * per_op_information;
    let results: Vec<(u64, f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut prng = loop {
                let mut w = || rng.random::<u64>() & mask;
                let mut g = StandInPrng::new(word_bits, PrngState::new(w(), w(), w(), w()))?;
                if scan_for_zero(&mut g).is_ok() {
                    break g;
                }
            };
            let problem = StateSearchProblem::emulate(&prng, window)?;
            let r = state_search(&problem, checker_ops, per_op_information, CostMeter::new(), rng.random())?;
            let replay = StandInPrng::new(word_bits, r.state)?.outputs(window);
            let exact = r.meter.accumulated_cost() == r.candidates_tested as f64 * per_candidate
                && replay == prng.outputs(window);
            Ok((r.candidates_tested, r.meter.accumulated_cost(), exact))
        })
        .collect::<Result<_, ToyError>>()?;
    let unknown_bits = StateSearchProblem::reduced_bits(word_bits);
    let n = trials as f64;
    Ok(StateSearchMean {
        word_bits,
        unknown_bits,
        trials,
        mean_candidates: results.iter().map(|r| r.0).sum::<u64>() as f64 / n,
        mean_cost: results.iter().map(|r| r.1).sum::<f64>() / n,
        expected_candidates: 2f64.powi(unknown_bits as i32 - 1),
        ledger_exact: results.iter().all(|r| r.2),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub points: Vec<StateSearchMean>,
    /// Least-squares slope of `log2(mean_cost)` against `w`.
    pub slope: f64,
    pub intercept: f64,
}

pub fn state_search_scaling(word_bits: &[u32], trials: u64, seed: u64) -> Result<ScalingFit, ToyError> {
    let points = word_bits
        .iter()
        .map(|&w| state_search_mean(w, trials, 16, 1.0, seed.wrapping_add(w as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<f64> = points.iter().map(|p| p.word_bits as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_cost.log2()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(ScalingFit {
        points,
        slope,
        intercept,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fraction of ones in `bits` keystream bits.
pub fn keystream_bias(bias: f64, bits: u64, seed: u64) -> Result<f64, ToyError> {
    Ok(KeystreamGen::new(bias, seed)?.ones_fraction(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_a_line() {
        let (m, b) = least_squares(&[1.0, 2.0, 3.0], &[5.0, 6.5, 8.0]);
        assert!((m - 1.5).abs() < 1e-12 && (b - 3.5).abs() < 1e-12);
    }

    #[test]
    fn small_brute_force_mean() {
        let r = brute_force_mean(8, 2000, 7.0, 1).unwrap();
        assert!(r.ledger_exact);
        assert!(r.relative_error().abs() < 0.05, "{r:?}");
    }

    #[test]
    fn one_bit_words_average_one_and_a_half() {
        let r = exhaustive_scan_mean(1).unwrap();
        assert_eq!(r.starts, 16);
        assert_eq!(r.zero_free, 0);
        assert_eq!(r.mean_words, 1.5);
    }

    #[test]
    fn trials_do_not_depend_on_thread_count() {
        let a = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let ra = a.install(|| state_search_mean(6, 40, 16, 1.0, 9).unwrap());
        let rb = b.install(|| state_search_mean(6, 40, 16, 1.0, 9).unwrap());
        assert_eq!(ra, rb);
    }
}
