//! Metered attacker-versus-environment games.
//!
//! Every attacker machine owns a run tape on which its requests and the
//! environment's replies alternate. Each attacker step is charged to a shared
//! budget before it runs; running dry loses the game. Challenges are scored
//! with a one-sided exact binomial test against a chance success rate.

mod engine;
mod keysearch;
mod machine;
mod otp;
mod tape;
mod transcript;

pub use engine::{
    play, ChargeKind, Environment, Game, GameConfig, GameOutcome, GameResult, LedgerEntry, MachineRecord,
    Transcript, BUDGET_QUERY,
};
pub use keysearch::{fleet_search, FleetSearchReport, KeySearchCoordinator, KeySearchEnvironment, KeySearcher};
pub use machine::{Action, MachineContext, MachineSpec, Strategy};
pub use otp::{
    distinguisher_success_probability, monobit_bias, run_otp_challenge, OtpDistinguisher, OtpEnvironment,
};
pub use tape::{frame, parse_framed, split_frames, Actor, FrameError, Move, MoveClass, RunTape, TapeViolation};
pub use transcript::{export_transcript, parse_transcript, ParsedTranscript, TranscriptError};

use statrs::distribution::{Binomial, DiscreteCDF};
use thiserror::Error;

use crate::cost::CostError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaultKind {
    #[error(transparent)]
    Tape(#[from] TapeViolation),
    #[error("attacker wrote a {0} move")]
    AttackerClass(MoveClass),
    #[error("environment answered with {actor} {class}")]
    BadReply { actor: Actor, class: MoveClass },
}

/// The game broke its own rules; distinct from either side losing.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("protocol fault on machine {machine} in round {round}: {kind}")]
pub struct ProtocolFault {
    pub machine: usize,
    pub round: u64,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("invalid game configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Fault(#[from] ProtocolFault),
    #[error("no result after {0} rounds")]
    RoundLimit(u64),
}

/// `P(X >= successes)` for `X ~ Binomial(trials, p)`.
pub fn binomial_p_value(successes: u64, trials: u64, p: f64) -> f64 {
    if successes == 0 {
        return 1.0;
    }
    if successes > trials {
        return 0.0;
    }
    let dist = Binomial::new(p, trials).expect("chance probability validated");
    dist.sf(successes - 1)
}

/// True when `successes` out of `trials` rejects chance at level `alpha`.
pub fn rejects_chance(successes: u64, trials: u64, p: f64, alpha: f64) -> bool {
    binomial_p_value(successes, trials, p) <= alpha
}
