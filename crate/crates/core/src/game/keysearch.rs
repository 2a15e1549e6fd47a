use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::{play, ChargeKind, Environment, GameConfig, GameOutcome, GameResult};
use super::machine::{Action, MachineContext, MachineSpec, Strategy};
use super::tape::{Move, MoveClass};
use super::GameError;
use crate::cost::Budget;
use crate::toy::ToyCipher;

/// Payload of the info request that returns the known pairs.
pub const PAIRS_QUERY: &[u8] = b"pairs";

/// Holds a secret toy-cipher key, hands out two known pairs and accepts a
/// 4-byte big-endian key as a challenge.
pub struct KeySearchEnvironment {
    cipher: ToyCipher,
    fixed_secret: Option<u64>,
    secret: u64,
    pairs: Vec<(u32, u32)>,
}

impl KeySearchEnvironment {
    /// With `secret = None` the key is drawn from the game seed.
    pub fn new(cipher: ToyCipher, secret: Option<u64>) -> Self {
        Self {
            cipher,
            fixed_secret: secret,
            secret: 0,
            pairs: Vec::new(),
        }
    }

    pub fn secret(&self) -> u64 {
        self.secret
    }
}

impl Environment for KeySearchEnvironment {
    fn reset(&mut self, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let drawn = rng.random_range(0..self.cipher.key_space());
        self.secret = self.fixed_secret.unwrap_or(drawn) & (self.cipher.key_space() - 1);
        let mask = (1u64 << self.cipher.block_bits()) - 1;
        let keys = self.cipher.schedule(self.secret).expect("secret masked to key size");
        self.pairs = (0..2)
            .map(|_| {
                let p = (rng.random::<u64>() & mask) as u32;
                (p, keys.encrypt(p))
            })
            .collect();
    }

    fn respond(&mut self, _machine: usize, request: &Move) -> Move {
        match request.class {
            MoveClass::InfoRequest if request.payload == PAIRS_QUERY => {
                Move::response(self.pairs.iter().flat_map(|(p, c)| [p.to_be_bytes(), c.to_be_bytes()]).flatten().collect::<Vec<u8>>())
            }
            MoveClass::Challenge => match <[u8; 4]>::try_from(request.payload.as_slice()) {
                Ok(k) => Move::response(vec![(u32::from_be_bytes(k) as u64 == self.secret) as u8]),
                Err(_) => Move::denial(b"key must be 4 bytes".to_vec()),
            },
            _ => Move::denial(Vec::new()),
        }
    }
}

fn decode_pairs(payload: &[u8]) -> Vec<(u32, u32)> {
    payload
        .chunks_exact(8)
        .map(|c| {
            (
                u32::from_be_bytes([c[0], c[1], c[2], c[3]]),
                u32::from_be_bytes([c[4], c[5], c[6], c[7]]),
            )
        })
        .collect()
}

/// Asks for the known pairs, splits the key space into equal slices and
/// spawns one searcher per slice.
pub struct KeySearchCoordinator {
    cipher: ToyCipher,
    fleet_size: u64,
    stage: u8,
}

impl KeySearchCoordinator {
    pub fn new(cipher: ToyCipher, fleet_size: u64) -> Self {
        Self {
            cipher,
            fleet_size,
            stage: 0,
        }
    }
}

impl Strategy for KeySearchCoordinator {
    fn machine_spec(&self) -> MachineSpec {
        MachineSpec::new(b"toy-key-search-coordinator".to_vec())
            .with_work_tape([self.cipher.key_bits().to_be_bytes(), (self.fleet_size as u32).to_be_bytes()].concat())
    }

    fn next_action(&mut self, ctx: &mut MachineContext<'_>) -> Action {
        self.stage += 1;
        match self.stage {
            1 => Action::Move(Move::attacker(MoveClass::InfoRequest, PAIRS_QUERY.to_vec())),
            2 => {
                let Some(reply) = ctx.read_next_reply() else {
                    return Action::Halt;
                };
                let pairs = decode_pairs(&reply.payload);
                let space = self.cipher.key_space();
                let chunk = space.div_ceil(self.fleet_size);
                let children = (0..self.fleet_size)
                    .map(|i| i * chunk)
                    .take_while(|&start| start < space)
                    .map(|start| {
                        Box::new(KeySearcher::new(self.cipher, pairs.clone(), start, chunk.min(space - start)))
                            as Box<dyn Strategy>
                    })
                    .collect();
                Action::Spawn(children)
            }
            _ => Action::Halt,
        }
    }
}

/// Tests one key of its slice per step and challenges with the first match.
pub struct KeySearcher {
    cipher: ToyCipher,
    pairs: Vec<(u32, u32)>,
    start: u64,
    count: u64,
    next: u64,
    found: Option<u32>,
    reported: bool,
}

impl KeySearcher {
    pub fn new(cipher: ToyCipher, pairs: Vec<(u32, u32)>, start: u64, count: u64) -> Self {
        Self {
            cipher,
            pairs,
            start,
            count,
            next: 0,
            found: None,
            reported: false,
        }
    }
}

impl Strategy for KeySearcher {
    fn machine_spec(&self) -> MachineSpec {
        let mut tape = Vec::with_capacity(20 + 8 * self.pairs.len());
        tape.extend(self.cipher.key_bits().to_be_bytes());
        tape.extend(self.start.to_be_bytes());
        tape.extend(self.count.to_be_bytes());
        for (p, c) in &self.pairs {
            tape.extend(p.to_be_bytes());
            tape.extend(c.to_be_bytes());
        }
        MachineSpec::new(b"toy-key-searcher".to_vec()).with_work_tape(tape)
    }

    fn next_action(&mut self, _ctx: &mut MachineContext<'_>) -> Action {
        if let Some(key) = self.found {
            if self.reported {
                return Action::Halt;
            }
            self.reported = true;
            return Action::Move(Move::attacker(MoveClass::Challenge, key.to_be_bytes().to_vec()));
        }
        if self.next >= self.count {
            return Action::Halt;
        }
        let key = (self.start + self.next) as u32;
        self.next += 1;
        let rk = self.cipher.schedule_unchecked(key);
        if self.pairs.iter().all(|&(p, c)| rk.encrypt(p) == c) {
            self.found = Some(key);
        }
        Action::Compute(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetSearchReport {
    pub outcome: GameOutcome,
    /// Rounds from the first key test up to the winning challenge.
    pub search_rounds: u64,
    /// Byte-steps charged for key tests made before the challenge.
    pub search_cost: f64,
}

/// Searches a `key_bits` toy key space with `fleet_size` spawned searchers,
/// each key test costing `per_key_cost`.
pub fn fleet_search(
    key_bits: u32,
    fleet_size: u64,
    secret: Option<u64>,
    per_key_cost: f64,
    seed: u64,
) -> Result<FleetSearchReport, GameError> {
    let cipher = ToyCipher::new(key_bits).map_err(|e| GameError::Config(e.to_string()))?;
    if fleet_size == 0 || fleet_size > cipher.key_space() {
        return Err(GameError::Config(format!(
            "fleet of {fleet_size} does not fit a {key_bits}-bit key space"
        )));
    }
    let mut env = KeySearchEnvironment::new(cipher, secret);
    let config = GameConfig::new(Budget::new(f64::INFINITY)?, seed, 1)
        .with_chance_probability(1.0 / cipher.key_space() as f64)
        .with_per_step_information(per_key_cost)
        .with_max_rounds(cipher.key_space().div_ceil(fleet_size) + 8);
    let outcome = play(Box::new(KeySearchCoordinator::new(cipher, fleet_size)), &mut env, config)?;
    let ledger = &outcome.transcript.ledger;
    let first = ledger.iter().find(|e| matches!(e.kind, ChargeKind::Compute(_))).map(|e| e.round);
    let end = ledger
        .iter()
        .find(|e| e.kind == ChargeKind::Move(MoveClass::Challenge))
        .map_or(outcome.rounds, |e| e.round);
    let search_rounds = first.map_or(0, |f| end - f);
    let search_cost = ledger
        .iter()
        .filter(|e| matches!(e.kind, ChargeKind::Compute(_)) && e.round < end)
        .map(|e| e.charged)
        .sum();
    Ok(FleetSearchReport {
        search_rounds,
        search_cost,
        outcome,
    })
}

impl FleetSearchReport {
    pub fn won(&self) -> bool {
        self.outcome.result == GameResult::Won
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fleet_finds_the_key() {
        let r = fleet_search(10, 16, Some(0x2a5), 100.0, 1).unwrap();
        assert!(r.won());
        // slice of 64 keys; 0x2a5 is offset 37 in slice 10
        assert_eq!(r.search_rounds, 38);
        assert_eq!(r.outcome.successes, 1);
        assert_eq!(r.outcome.transcript.machines.len(), 17);
    }

    #[test]
    fn worst_case_key_costs_the_whole_space() {
        let r = fleet_search(8, 4, Some(63), 10.0, 2).unwrap();
        assert!(r.won());
        assert_eq!(r.search_rounds, 64);
        assert_eq!(r.search_cost, 256.0 * 10.0);
    }

    #[test]
    fn rejects_oversized_fleet() {
        assert!(fleet_search(4, 17, None, 1.0, 0).is_err());
        assert!(fleet_search(4, 0, None, 1.0, 0).is_err());
    }
}
