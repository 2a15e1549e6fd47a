//! Desk-scale cryptosystems used as empirical oracles for the cost model.
//!
//! None of these primitives is meant to be secure. They are pinned bit-exactly
//! (see `data/toy_constants.txt`) so that measured search costs can be
//! compared against the closed-form estimates.
//!
//! The PRNG state search does not reimplement a real state-reduction attack.
//! It fixes all but `ceil(1.5w)` state bits to their true values and searches
//! the rest, so that the cost accounting of a `1.5w`-bit search is exercised
//! honestly without claiming anything about the real generator.

mod cipher;
mod keystream;
mod order;
mod prng;

pub use cipher::{brute_force_search, BruteForceResult, RoundKeys, ToyCipher, MAX_KEY_BITS};
pub use keystream::{KeystreamGen, KeystreamSource};
pub use order::SearchOrder;
pub use prng::{
    scan_for_zero, state_search, PrngState, StandInPrng, StateSearchProblem, StateSearchResult,
    MAX_WORD_BITS,
};

use thiserror::Error;

/// Round constants of the Feistel key schedule.
pub const ROUND_CONSTANTS: [u32; 4] = [0x0123_4567, 0x89AB_CDEF, 0xFEDC_BA98, 0x7654_3210];
/// Odd multiplier spreading key bits across the product.
pub const KEY_MULTIPLIER: u32 = 0x9E37_79B9;
/// Left rotation inside the round function.
pub const ROUND_ROTATION: u32 = 5;

/// The shipped constants file.
pub const CONSTANTS_FILE: &str = include_str!("../../data/toy_constants.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("key length {0} outside 1..={max}", max = MAX_KEY_BITS)]
    KeyBits(u32),
    #[error("key {key:#x} does not fit in {bits} bits")]
    KeyOutOfRange { key: u64, bits: u32 },
    #[error("block {block:#x} does not fit in {bits} bits")]
    BlockOutOfRange { block: u64, bits: u32 },
    #[error("no key consistent with the known pairs after {tested} candidates")]
    Exhausted { tested: u64 },
    #[error("at least one known plaintext/ciphertext pair is required")]
    NoPairs,
    #[error("word size {0} outside 1..={max}", max = MAX_WORD_BITS)]
    WordBits(u32),
    #[error("state word {0:#x} does not fit the word size")]
    StateOutOfRange(u64),
    #[error("no zero word within {cap} outputs")]
    ZeroNotFound { cap: u64 },
    #[error("no candidate state reproduces the observed outputs ({tested} tested)")]
    NoMatchingState { tested: u64 },
    #[error("observation window is empty")]
    EmptyWindow,
    #[error("bias must lie in [0, 1], got {0}")]
    Bias(f64),
    #[error(transparent)]
    Cost(#[from] crate::cost::CostError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_file_matches_code() {
        let mut rc = Vec::new();
        let mut multiplier = None;
        let mut rotation = None;
        for line in CONSTANTS_FILE.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').unwrap();
            let parse = |v: &str| u32::from_str_radix(v.trim().trim_start_matches("0x"), 16).unwrap();
            match key.trim() {
                "round_constants" => rc = value.split(',').map(parse).collect(),
                "multiplier" => multiplier = Some(parse(value)),
                "rotation" => rotation = Some(value.trim().parse::<u32>().unwrap()),
                _ => {}
            }
        }
        assert_eq!(rc, ROUND_CONSTANTS);
        assert_eq!(multiplier, Some(KEY_MULTIPLIER));
        assert_eq!(rotation, Some(ROUND_ROTATION));
    }
}
