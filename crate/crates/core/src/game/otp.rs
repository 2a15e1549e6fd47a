use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, Discrete};

use super::engine::{play, Environment, GameConfig};
use super::machine::{Action, MachineContext, MachineSpec, Strategy};
use super::tape::{frame, split_frames, Move, MoveClass};
use super::GameError;
use crate::cost::Budget;
use crate::toy::KeystreamSource;

/// Chosen-plaintext game against a one-time pad with a pluggable keystream.
///
/// An encryption request carries two framed plaintexts. The shorter one is
/// zero-padded, one is picked with a seeded coin and XORed with fresh
/// keystream. The following challenge names the pick in a one-byte payload.
pub struct OtpEnvironment<K: KeystreamSource> {
    keystream: K,
    choice: ChaCha8Rng,
    pending: Option<u8>,
}

impl<K: KeystreamSource> OtpEnvironment<K> {
    pub fn new(keystream: K) -> Self {
        Self {
            keystream,
            choice: ChaCha8Rng::seed_from_u64(0),
            pending: None,
        }
    }

    pub fn into_keystream(self) -> K {
        self.keystream
    }
}

impl<K: KeystreamSource> Environment for OtpEnvironment<K> {
    fn reset(&mut self, seed: u64) {
        self.keystream.reseed(seed);
        self.choice = ChaCha8Rng::seed_from_u64(seed);
        self.choice.set_stream(1);
        self.pending = None;
    }

    fn respond(&mut self, _machine: usize, request: &Move) -> Move {
        match request.class {
            MoveClass::EncryptionRequest => {
                let Ok(parts) = split_frames(&request.payload) else {
                    return Move::denial(b"malformed".to_vec());
                };
                if parts.len() != 2 || parts.iter().any(|p| p.is_empty()) {
                    return Move::denial(b"need two non-empty plaintexts".to_vec());
                }
                let len = parts[0].len().max(parts[1].len());
                let pick = self.choice.random::<bool>() as u8;
                let mut ct = vec![0u8; len];
                self.keystream.fill_bytes(&mut ct);
                for (c, p) in ct.iter_mut().zip(parts[pick as usize]) {
                    *c ^= p;
                }
                self.pending = Some(pick);
                Move::response(ct)
            }
            MoveClass::Challenge => match (self.pending.take(), request.payload.as_slice()) {
                (Some(pick), [guess]) => Move::response(vec![(pick == *guess) as u8]),
                _ => Move::denial(b"no pending ciphertext".to_vec()),
            },
            _ => Move::denial(Vec::new()),
        }
    }
}

/// `|2 * ones - bits|` over a byte string.
pub fn monobit_bias(bytes: &[u8]) -> u64 {
    let ones: u64 = bytes.iter().map(|b| b.count_ones() as u64).sum();
    (2 * ones).abs_diff(8 * bytes.len() as u64)
}

/// XORs the ciphertext with each candidate and names the one whose residual
/// keystream is further from balanced. Ties go to the first candidate.
pub struct OtpDistinguisher {
    plaintexts: [Vec<u8>; 2],
    awaiting: Option<MoveClass>,
}

impl OtpDistinguisher {
    pub fn new(p0: Vec<u8>, p1: Vec<u8>) -> Self {
        Self {
            plaintexts: [p0, p1],
            awaiting: None,
        }
    }

    /// 256-bit all-zero and alternating `0x55` plaintexts.
    pub fn standard() -> Self {
        Self::new(vec![0u8; 32], vec![0x55u8; 32])
    }

    pub fn guess(&self, ciphertext: &[u8]) -> u8 {
        let residual = |p: &[u8]| -> Vec<u8> {
            ciphertext
                .iter()
                .enumerate()
                .map(|(i, c)| c ^ p.get(i).copied().unwrap_or(0))
                .collect()
        };
        let s0 = monobit_bias(&residual(&self.plaintexts[0]));
        let s1 = monobit_bias(&residual(&self.plaintexts[1]));
        (s1 > s0) as u8
    }
}

impl Strategy for OtpDistinguisher {
    fn machine_spec(&self) -> MachineSpec {
        let mut tape = frame(&self.plaintexts[0]);
        tape.extend(frame(&self.plaintexts[1]));
        MachineSpec::new(b"otp-monobit-distinguisher".to_vec()).with_work_tape(tape)
    }

    fn next_action(&mut self, ctx: &mut MachineContext<'_>) -> Action {
        let reply = self.awaiting.and_then(|_| ctx.read_next_reply());
        match (self.awaiting.take(), reply) {
            (Some(MoveClass::EncryptionRequest), Some(r)) if r.class == MoveClass::Response => {
                self.awaiting = Some(MoveClass::Challenge);
                Action::Move(Move::attacker(MoveClass::Challenge, vec![self.guess(&r.payload)]))
            }
            _ => {
                let mut payload = frame(&self.plaintexts[0]);
                payload.extend(frame(&self.plaintexts[1]));
                self.awaiting = Some(MoveClass::EncryptionRequest);
                Action::Move(Move::attacker(MoveClass::EncryptionRequest, payload))
            }
        }
    }
}

/// Plays `trials` challenges of the standard distinguisher with an unlimited
/// budget and returns how many it got right.
pub fn run_otp_challenge<K: KeystreamSource>(keystream: K, trials: u64, seed: u64) -> Result<u64, GameError> {
    let mut env = OtpEnvironment::new(keystream);
    let budget = Budget::new(f64::INFINITY)?;
    let outcome = play(Box::new(OtpDistinguisher::standard()), &mut env, GameConfig::new(budget, seed, trials))?;
    Ok(outcome.successes)
}

/// Exact per-trial success probability of the standard distinguisher when
/// keystream bits are ones with probability `bias`.
///
/// `0x55` flips every other bit, so with `a` ones among the unflipped half and
/// `b` among the flipped half the true residual has `a + b` ones and the
/// wrong one `a + 128 - b`.
pub fn distinguisher_success_probability(bias: f64) -> f64 {
    let half = 128u64;
    let dist = Binomial::new(bias, half).expect("bias in [0, 1]");
    let pmf: Vec<f64> = (0..=half).map(|x| dist.pmf(x)).collect();
    let stat = |ones: u64| (2 * ones).abs_diff(2 * half);
    let mut p = 0.0;
    for a in 0..=half {
        for b in 0..=half {
            let w = pmf[a as usize] * pmf[b as usize];
            let right = stat(a + b);
            let wrong = stat(a + half - b);
            p += w * match right.cmp(&wrong) {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Equal => 0.5,
                std::cmp::Ordering::Less => 0.0,
            };
        }
    }
    p
}
