use super::{SearchOrder, ToyError};
use crate::cost::CostMeter;

/// Words are at most 16 bits so the whole state fits in a `u64`.
pub const MAX_WORD_BITS: u32 = 16;

/// Four w-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrngState {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl PrngState {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        Self { a, b, c, d }
    }

    /// `a` in the most significant word, `d` in the least.
    pub fn pack(&self, w: u32) -> u64 {
        (self.a << (3 * w)) | (self.b << (2 * w)) | (self.c << w) | self.d
    }

    pub fn unpack(bits: u64, w: u32) -> Self {
        let m = word_mask(w);
        Self {
            a: (bits >> (3 * w)) & m,
            b: (bits >> (2 * w)) & m,
            c: (bits >> w) & m,
            d: bits & m,
        }
    }
}

#[inline]
fn word_mask(w: u32) -> u64 {
    (1u64 << w) - 1
}

/// Generator with a `4w`-bit state and `w`-bit outputs (add-rotate-xor schedule).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandInPrng {
    word_bits: u32,
    state: PrngState,
}

impl StandInPrng {
    pub fn new(word_bits: u32, state: PrngState) -> Result<Self, ToyError> {
        if !(1..=MAX_WORD_BITS).contains(&word_bits) {
            return Err(ToyError::WordBits(word_bits));
        }
        let m = word_mask(word_bits);
        for v in [state.a, state.b, state.c, state.d] {
            if v > m {
                return Err(ToyError::StateOutOfRange(v));
            }
        }
        Ok(Self { word_bits, state })
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    pub fn state_bits(&self) -> u32 {
        4 * self.word_bits
    }

    pub fn state(&self) -> PrngState {
        self.state
    }

    #[inline]
    fn rotl(&self, x: u64, r: u32) -> u64 {
        let w = self.word_bits;
        let r = r % w;
        if r == 0 {
            x
        } else {
            ((x << r) | (x >> (w - r))) & word_mask(w)
        }
    }

    /// Advances one step and returns the output word.
    #[inline]
    pub fn next_word(&mut self) -> u64 {
        let m = word_mask(self.word_bits);
        let PrngState { a, b, c, d } = self.state;
        let a2 = (a + self.rotl(b, 1)) & m;
        let b2 = b ^ self.rotl(c, 2);
        let c2 = ((c + d) & m) ^ 1;
        let d2 = self.rotl(d ^ a, 3);
        self.state = PrngState::new(a2, b2, c2, d2);
        (a2 + c2) & m
    }

    pub fn outputs(&mut self, n: usize) -> Vec<u64> {
        (0..n).map(|_| self.next_word()).collect()
    }
}

/// Runs the generator until it emits an all-zero word; returns the number of
/// words consumed, including the zero. Gives up after `2^(w+4)` words.
pub fn scan_for_zero(prng: &mut StandInPrng) -> Result<u64, ToyError> {
    let cap = 1u64 << (prng.word_bits + 4);
    for n in 1..=cap {
        if prng.next_word() == 0 {
            return Ok(n);
        }
    }
    Err(ToyError::ZeroNotFound { cap })
}

/// A state-recovery instance: the attacker knows every state bit except the
/// lowest `unknown_bits` of the packed state, plus a window of outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSearchProblem {
    word_bits: u32,
    unknown_bits: u32,
    known_bits: u64,
    observed: Vec<u64>,
}

impl StateSearchProblem {
    /// `ceil(1.5w)` unknown bits.
    pub fn reduced_bits(word_bits: u32) -> u32 {
        (3 * word_bits).div_ceil(2)
    }

    /// Builds the reduced search from the true state the generator is in right
    /// after its zero word, observing the next `window` outputs.
    pub fn emulate(prng: &StandInPrng, window: usize) -> Result<Self, ToyError> {
        if window == 0 {
            return Err(ToyError::EmptyWindow);
        }
        let w = prng.word_bits();
        let unknown_bits = Self::reduced_bits(w);
        let packed = prng.state().pack(w);
        let known_bits = packed & !((1u64 << unknown_bits) - 1);
        let observed = prng.clone().outputs(window);
        Ok(Self {
            word_bits: w,
            unknown_bits,
            known_bits,
            observed,
        })
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    pub fn unknown_bits(&self) -> u32 {
        self.unknown_bits
    }

    pub fn observed(&self) -> &[u64] {
        &self.observed
    }

    pub fn candidate_count(&self) -> u64 {
        1u64 << self.unknown_bits
    }

    fn matches(&self, candidate: PrngState) -> bool {
        let mut g = StandInPrng {
            word_bits: self.word_bits,
            state: candidate,
        };
        self.observed.iter().all(|&o| g.next_word() == o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSearchResult {
    pub state: PrngState,
    pub candidates_tested: u64,
    pub meter: CostMeter,
}

/// Tests candidate states in seeded random order. Each candidate costs
/// `checker_ops` steps of `per_op_information` byte-steps.
pub fn state_search(
    problem: &StateSearchProblem,
    checker_ops: u32,
    per_op_information: f64,
    meter: CostMeter,
    seed: u64,
) -> Result<StateSearchResult, ToyError> {
    let order = SearchOrder::new(problem.unknown_bits, seed);
    let per_candidate = checker_ops as f64 * per_op_information;
    let mut meter = meter;
    for index in 0..order.len() {
        let bits = problem.known_bits | order.at(index);
        meter = meter.record_step(per_candidate)?;
        let candidate = PrngState::unpack(bits, problem.word_bits);
        if problem.matches(candidate) {
            return Ok(StateSearchResult {
                state: candidate,
                candidates_tested: index + 1,
                meter,
            });
        }
    }
    Err(ToyError::NoMatchingState { tested: order.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prng(w: u32, a: u64, b: u64, c: u64, d: u64) -> StandInPrng {
        StandInPrng::new(w, PrngState::new(a, b, c, d)).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(StandInPrng::new(0, PrngState::new(0, 0, 0, 0)), Err(ToyError::WordBits(0)));
        assert_eq!(StandInPrng::new(17, PrngState::new(0, 0, 0, 0)), Err(ToyError::WordBits(17)));
        assert_eq!(
            StandInPrng::new(4, PrngState::new(16, 0, 0, 0)),
            Err(ToyError::StateOutOfRange(16))
        );
    }

    #[test]
    fn pack_round_trip() {
        let s = PrngState::new(0xa, 0xb, 0xc, 0xd);
        assert_eq!(s.pack(4), 0xabcd);
        assert_eq!(PrngState::unpack(0xabcd, 4), s);
    }

    #[test]
    fn zero_next_gives_one_word_scan() {
        // b, c, d arbitrary; a chosen so that a' + c' wraps to zero.
        let (w, b, c, d) = (8u32, 0x12u64, 0x34u64, 0x56u64);
        let m = word_mask(w);
        let c2 = ((c + d) & m) ^ 1;
        let rot_b = ((b << 1) | (b >> (w - 1))) & m;
        let a = (0u64.wrapping_sub(c2).wrapping_sub(rot_b)) & m;
        assert_eq!(a, 0x51);
        assert_eq!(scan_for_zero(&mut prng(w, a, b, c, d)).unwrap(), 1);
    }

    #[test]
    fn zero_free_cycle_reports_not_found() {
        let w = 4;
        let stuck = (0..1u64 << 16)
            .map(|bits| PrngState::unpack(bits, w))
            .find(|s| scan_for_zero(&mut StandInPrng::new(w, *s).unwrap()).is_err())
            .expect("pinned generator has zero-free cycles at w=4");
        assert_eq!(
            scan_for_zero(&mut StandInPrng::new(w, stuck).unwrap()),
            Err(ToyError::ZeroNotFound { cap: 256 })
        );
    }

    #[test]
    fn state_search_recovers_a_consistent_state() {
        let g = prng(8, 0x6d, 0x13, 0x2c, 0xde);
        let problem = StateSearchProblem::emulate(&g, 16).unwrap();
        assert_eq!(problem.unknown_bits(), 12);
        let r = state_search(&problem, 16, 1.0, CostMeter::new(), 5).unwrap();
        let mut replay = StandInPrng::new(8, r.state).unwrap();
        assert_eq!(replay.outputs(16), problem.observed());
        assert_eq!(r.meter.accumulated_cost(), r.candidates_tested as f64 * 16.0);
    }

    #[test]
    fn reduced_bits_rounds_up() {
        assert_eq!(StateSearchProblem::reduced_bits(8), 12);
        assert_eq!(StateSearchProblem::reduced_bits(7), 11);
        assert_eq!(StateSearchProblem::reduced_bits(1), 2);
        assert!(StateSearchProblem::emulate(&prng(4, 1, 2, 3, 4), 0).is_err());
    }
}
