use std::collections::BTreeMap;

use super::machine::{Action, MachineContext, MachineSpec, Strategy};
use super::tape::{Actor, Move, MoveClass, RunTape};
use super::{rejects_chance, FaultKind, GameError, ProtocolFault};
use crate::cost::{Budget, ChargeOutcome};

/// Payload of an info request answered by the engine with the remaining
/// budget as a big-endian `f64`.
pub const BUDGET_QUERY: &[u8] = b"budget";

/// The defending side. Its own work is free.
pub trait Environment {
    fn reset(&mut self, seed: u64);

    /// Exactly one `Response` or `Denial` per attacker request.
    fn respond(&mut self, machine: usize, request: &Move) -> Move;

    /// A move the environment wants to write on its own initiative. Any
    /// `Some` faults the game.
    fn unprompted(&mut self, _machine: usize) -> Option<Move> {
        None
    }

    fn permit_spawn(&mut self, _parent: usize, _count: usize) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub budget: Budget,
    pub rng_seed: u64,
    pub challenge_trials: u64,
    pub win_threshold: f64,
    /// Byte-steps per attacker step. `None` uses description size plus
    /// current work-tape length of the acting machine.
    pub per_step_information: Option<f64>,
    /// Success probability of a blind guess at one challenge.
    pub chance_probability: f64,
    pub valuation: Vec<u8>,
    pub max_rounds: Option<u64>,
}

impl GameConfig {
    pub fn new(budget: Budget, rng_seed: u64, challenge_trials: u64) -> Self {
        Self {
            budget,
            rng_seed,
            challenge_trials,
            win_threshold: 0.01,
            per_step_information: None,
            chance_probability: 0.5,
            valuation: Vec::new(),
            max_rounds: None,
        }
    }

    pub fn with_win_threshold(mut self, alpha: f64) -> Self {
        self.win_threshold = alpha;
        self
    }

    pub fn with_per_step_information(mut self, info: f64) -> Self {
        self.per_step_information = Some(info);
        self
    }

    pub fn with_chance_probability(mut self, p: f64) -> Self {
        self.chance_probability = p;
        self
    }

    pub fn with_valuation(mut self, valuation: Vec<u8>) -> Self {
        self.valuation = valuation;
        self
    }

    pub fn with_max_rounds(mut self, rounds: u64) -> Self {
        self.max_rounds = Some(rounds);
        self
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |m: String| Err(GameError::Config(m));
        if self.challenge_trials == 0 {
            return bad("challenge_trials must be at least 1".into());
        }
        if !(self.win_threshold > 0.0 && self.win_threshold < 1.0) {
            return bad(format!("win_threshold {} outside (0, 1)", self.win_threshold));
        }
        if !(self.chance_probability > 0.0 && self.chance_probability < 1.0) {
            return bad(format!("chance_probability {} outside (0, 1)", self.chance_probability));
        }
        if let Some(i) = self.per_step_information {
            if !(i.is_finite() && i >= 0.0) {
                return bad(format!("per_step_information {i} must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameResult {
    Won,
    LostBudgetDepleted,
    LostChallengeFailed,
}

impl GameResult {
    pub fn as_str(self) -> &'static str {
        match self {
            GameResult::Won => "won",
            GameResult::LostBudgetDepleted => "lost_budget_depleted",
            GameResult::LostChallengeFailed => "lost_challenge_failed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [GameResult::Won, GameResult::LostBudgetDepleted, GameResult::LostChallengeFailed]
            .into_iter()
            .find(|r| r.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeKind {
    Move(MoveClass),
    Compute(u64),
    Spawn(u64),
}

/// One budget deduction. `charged` differs from `requested` only for the
/// step that depleted the budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub machine: usize,
    pub round: u64,
    pub kind: ChargeKind,
    pub requested: f64,
    pub charged: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub born_round: u64,
    pub description_bytes: u64,
    pub tape: RunTape,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub machines: Vec<MachineRecord>,
    pub ledger: Vec<LedgerEntry>,
}

impl Transcript {
    pub fn ledger_total(&self) -> f64 {
        self.ledger.iter().map(|e| e.charged).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub result: GameResult,
    pub transcript: Transcript,
    pub total_cost: f64,
    pub successes: u64,
    pub trials: u64,
    pub rounds: u64,
    pub budget: Budget,
}

struct Machine {
    id: usize,
    parent: Option<usize>,
    born_round: u64,
    strategy: Box<dyn Strategy>,
    description_bytes: u64,
    regions: Vec<u32>,
    tape: RunTape,
    valuation: Vec<u8>,
    work_tape: Vec<u8>,
    halted: bool,
}

/// A game in progress. Machines act round-robin in id order; machines
/// spawned during a round first act in the next one.
pub struct Game<'e> {
    env: &'e mut dyn Environment,
    config: GameConfig,
    budget: Budget,
    machines: Vec<Machine>,
    shared: BTreeMap<u32, Vec<u8>>,
    ledger: Vec<LedgerEntry>,
    total_cost: f64,
    successes: u64,
    trials: u64,
    round: u64,
    result: Option<GameResult>,
}

enum Charged {
    Ok,
    Depleted,
}

impl<'e> Game<'e> {
    pub fn new(
        strategy: Box<dyn Strategy>,
        env: &'e mut dyn Environment,
        config: GameConfig,
    ) -> Result<Self, GameError> {
        config.validate()?;
        env.reset(config.rng_seed);
        let valuation = config.valuation.clone();
        let mut game = Self {
            env,
            budget: config.budget,
            config,
            machines: Vec::new(),
            shared: BTreeMap::new(),
            ledger: Vec::new(),
            total_cost: 0.0,
            successes: 0,
            trials: 0,
            round: 0,
            result: None,
        };
        game.register(strategy, None, 0, valuation);
        Ok(game)
    }

    fn register(&mut self, strategy: Box<dyn Strategy>, parent: Option<usize>, born_round: u64, valuation: Vec<u8>) {
        let spec = strategy.machine_spec();
        for r in &spec.shared_regions {
            self.shared.entry(*r).or_default();
        }
        let id = self.machines.len();
        self.machines.push(Machine {
            id,
            parent,
            born_round,
            description_bytes: spec.description_bytes(),
            regions: spec.shared_regions,
            work_tape: spec.work_tape,
            strategy,
            tape: RunTape::new(),
            valuation,
            halted: false,
        });
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn result(&self) -> Option<GameResult> {
        self.result
    }

    pub fn rounds(&self) -> u64 {
        self.round
    }

    pub fn live_machines(&self) -> usize {
        self.machines.iter().filter(|m| !m.halted).count()
    }

    pub fn machine_count(&self) -> usize {
        self.machines.len()
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn tape(&self, machine: usize) -> Option<&RunTape> {
        self.machines.get(machine).map(|m| &m.tape)
    }

    pub fn shared_region(&self, region: u32) -> Option<&[u8]> {
        self.shared.get(&region).map(Vec::as_slice)
    }

    fn fault(&self, machine: usize, kind: impl Into<FaultKind>) -> GameError {
        GameError::Fault(ProtocolFault {
            machine,
            round: self.round,
            kind: kind.into(),
        })
    }

    fn charge(&mut self, machine: usize, kind: ChargeKind, cost: f64) -> Result<Charged, GameError> {
        let before = self.budget.remaining();
        let outcome = self.budget.charge(cost)?;
        let charged = if outcome.is_depleted() { before } else { cost };
        self.budget = outcome.budget();
        self.total_cost += charged;
        self.ledger.push(LedgerEntry {
            machine,
            round: self.round,
            kind,
            requested: cost,
            charged,
        });
        Ok(match outcome {
            ChargeOutcome::Solvent(_) => Charged::Ok,
            ChargeOutcome::Depleted(_) => {
                self.result = Some(GameResult::LostBudgetDepleted);
                Charged::Depleted
            }
        })
    }

    fn per_step(&self, machine: usize) -> f64 {
        let m = &self.machines[machine];
        self.config
            .per_step_information
            .unwrap_or((m.description_bytes + m.work_tape.len() as u64) as f64)
    }

    fn append_reply(&mut self, machine: usize, reply: Move) -> Result<(), GameError> {
        if reply.actor != Actor::Environment || reply.class.is_request() {
            return Err(self.fault(
                machine,
                FaultKind::BadReply {
                    actor: reply.actor,
                    class: reply.class,
                },
            ));
        }
        self.machines[machine]
            .tape
            .append(reply)
            .map_err(|v| self.fault(machine, v))?;
        Ok(())
    }

    /// Runs one round. Returns the result once the game is over.
    pub fn step(&mut self) -> Result<Option<GameResult>, GameError> {
        if self.result.is_some() {
            return Ok(self.result);
        }
        if let Some(limit) = self.config.max_rounds {
            if self.round >= limit {
                return Err(GameError::RoundLimit(limit));
            }
        }
        let active = self.machines.len();
        for i in 0..active {
            if self.machines[i].halted || self.machines[i].born_round > self.round {
                continue;
            }
            self.turn(i)?;
            if self.result.is_some() {
                break;
            }
        }
        self.round += 1;
        if self.result.is_none() && self.machines.iter().all(|m| m.halted) {
            self.result = Some(GameResult::LostChallengeFailed);
        }
        Ok(self.result)
    }

    fn turn(&mut self, i: usize) -> Result<(), GameError> {
        if self.env.unprompted(i).is_some() {
            let index = self.machines[i].tape.len();
            return Err(self.fault(i, super::TapeViolation::Unprompted { index }));
        }
        let info = self.per_step(i);
        let round = self.round;
        let m = &mut self.machines[i];
        let mut ctx = MachineContext {
            id: i,
            round,
            tape: &mut m.tape,
            valuation: &m.valuation,
            work_tape: &mut m.work_tape,
            shared: &mut self.shared,
            regions: &m.regions,
            violation: None,
        };
        let action = m.strategy.next_action(&mut ctx);
        if let Some(v) = ctx.violation {
            return Err(self.fault(i, v));
        }
        match action {
            Action::Halt => {
                self.machines[i].halted = true;
            }
            Action::Compute(0) => {}
            Action::Compute(n) => {
                self.charge(i, ChargeKind::Compute(n), n as f64 * info)?;
            }
            Action::Move(mv) => self.attacker_move(i, mv, info)?,
            Action::Spawn(children) => self.spawn(i, children)?,
        }
        Ok(())
    }

    fn attacker_move(&mut self, i: usize, mv: Move, info: f64) -> Result<(), GameError> {
        if mv.actor != Actor::Attacker || !mv.class.is_request() {
            return Err(self.fault(i, FaultKind::AttackerClass(mv.class)));
        }
        if let Charged::Depleted = self.charge(i, ChargeKind::Move(mv.class), info)? {
            return Ok(());
        }
        self.machines[i].tape.append(mv.clone()).map_err(|v| self.fault(i, v))?;
        if mv.class == MoveClass::InfoRequest && mv.payload == BUDGET_QUERY {
            let remaining = self.budget.remaining().to_be_bytes().to_vec();
            return self.append_reply(i, Move::response(remaining));
        }
        let reply = self.env.respond(i, &mv);
        let success = reply.class == MoveClass::Response && reply.payload == [1];
        self.append_reply(i, reply)?;
        if mv.class == MoveClass::Challenge {
            self.trials += 1;
            self.successes += success as u64;
            if self.trials >= self.config.challenge_trials {
                let won = rejects_chance(
                    self.successes,
                    self.trials,
                    self.config.chance_probability,
                    self.config.win_threshold,
                );
                self.result = Some(if won { GameResult::Won } else { GameResult::LostChallengeFailed });
            }
        }
        Ok(())
    }

    fn spawn(&mut self, i: usize, children: Vec<Box<dyn Strategy>>) -> Result<(), GameError> {
        let specs: Vec<MachineSpec> = children.iter().map(|c| c.machine_spec()).collect();
        let cost: u64 = specs.iter().map(MachineSpec::description_bytes).sum();
        if let Charged::Depleted = self.charge(i, ChargeKind::Spawn(children.len() as u64), cost as f64)? {
            return Ok(());
        }
        let payload: Vec<u8> = specs.iter().flat_map(|s| super::frame(&s.description())).collect();
        let request = Move::attacker(MoveClass::StructuralRequest, payload);
        self.machines[i].tape.append(request).map_err(|v| self.fault(i, v))?;
        if !self.env.permit_spawn(i, children.len()) {
            return self.append_reply(i, Move::denial(Vec::new()));
        }
        let first = self.machines.len();
        let born = self.round + 1;
        for child in children {
            let valuation = self.machines[i].valuation.clone();
            self.register(child, Some(i), born, valuation);
        }
        let ids: Vec<u8> = (first..self.machines.len())
            .flat_map(|id| (id as u32).to_be_bytes())
            .collect();
        self.append_reply(i, Move::response(ids))
    }

    /// Plays until the game is decided.
    pub fn finish(mut self) -> Result<GameOutcome, GameError> {
        let result = loop {
            if let Some(r) = self.step()? {
                break r;
            }
        };
        Ok(GameOutcome {
            result,
            transcript: Transcript {
                machines: self
                    .machines
                    .into_iter()
                    .map(|m| MachineRecord {
                        id: m.id,
                        parent: m.parent,
                        born_round: m.born_round,
                        description_bytes: m.description_bytes,
                        tape: m.tape,
                    })
                    .collect(),
                ledger: self.ledger,
            },
            total_cost: self.total_cost,
            successes: self.successes,
            trials: self.trials,
            rounds: self.round,
            budget: self.budget,
        })
    }
}

pub fn play(
    strategy: Box<dyn Strategy>,
    env: &mut dyn Environment,
    config: GameConfig,
) -> Result<GameOutcome, GameError> {
    Game::new(strategy, env, config)?.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameError, TapeViolation};

    /// Replays a fixed list of actions, then halts.
    struct Script {
        spec: MachineSpec,
        actions: Vec<Action>,
        replies: Vec<Move>,
    }

    impl Script {
        fn new(actions: Vec<Action>) -> Self {
            Self {
                spec: MachineSpec::default(),
                actions: actions.into_iter().rev().collect(),
                replies: Vec::new(),
            }
        }

        fn sized(mut self, description_bytes: usize) -> Self {
            self.spec = MachineSpec::new(vec![0u8; description_bytes - 16]);
            self
        }
    }

    impl Strategy for Script {
        fn machine_spec(&self) -> MachineSpec {
            self.spec.clone()
        }

        fn next_action(&mut self, ctx: &mut MachineContext<'_>) -> Action {
            while let Some(r) = ctx.read_next_reply() {
                self.replies.push(r);
            }
            self.actions.pop().unwrap_or(Action::Halt)
        }
    }

    struct Echo;

    impl Environment for Echo {
        fn reset(&mut self, _seed: u64) {}

        fn respond(&mut self, _machine: usize, request: &Move) -> Move {
            match request.class {
                MoveClass::Challenge => Move::response(request.payload.clone()),
                _ => Move::response(Vec::new()),
            }
        }
    }

    fn config(budget: f64) -> GameConfig {
        GameConfig::new(Budget::new(budget).unwrap(), 0, 1)
    }

    fn info(payload: &[u8]) -> Action {
        Action::Move(Move::attacker(MoveClass::InfoRequest, payload.to_vec()))
    }

    #[test]
    fn budget_query_reports_remaining_after_its_own_charge() {
        let mut env = Echo;
        let strat = Script::new(vec![Action::Compute(4), info(BUDGET_QUERY)]);
        let mut g = Game::new(Box::new(strat), &mut env, config(100.0).with_per_step_information(10.0)).unwrap();
        g.step().unwrap();
        assert_eq!(g.budget().remaining(), 60.0);
        g.step().unwrap();
        let reply = &g.tape(0).unwrap().moves()[1];
        assert_eq!(f64::from_be_bytes(reply.payload[..].try_into().unwrap()), 50.0);
    }

    #[test]
    fn query_at_exact_exhaustion_answers_zero() {
        let mut env = Echo;
        let strat = Script::new(vec![Action::Compute(9), info(BUDGET_QUERY), Action::Compute(1)]);
        let mut g = Game::new(Box::new(strat), &mut env, config(100.0).with_per_step_information(10.0)).unwrap();
        g.step().unwrap();
        assert_eq!(g.step().unwrap(), None);
        let reply = &g.tape(0).unwrap().moves()[1];
        assert_eq!(f64::from_be_bytes(reply.payload[..].try_into().unwrap()), 0.0);
        assert_eq!(g.step().unwrap(), Some(GameResult::LostBudgetDepleted));
    }

    #[test]
    fn zero_budget_loses_on_first_move() {
        let mut env = Echo;
        let out = play(Box::new(Script::new(vec![info(b"x")])), &mut env, config(0.0).with_per_step_information(1.0))
            .unwrap();
        assert_eq!(out.result, GameResult::LostBudgetDepleted);
        assert!(out.transcript.machines[0].tape.is_empty());
        assert_eq!(out.rounds, 1);
    }

    #[test]
    fn spawn_charges_description_bytes() {
        let mut env = Echo;
        let child = Script::new(vec![Action::Compute(1)]).sized(1024);
        let parent = Script::new(vec![Action::Spawn(vec![Box::new(child)])]);
        let cfg = config(10_240.0).with_per_step_information(0.0);
        let mut g = Game::new(Box::new(parent), &mut env, cfg).unwrap();
        g.step().unwrap();
        assert_eq!(g.budget().remaining(), 9216.0);
        assert_eq!(g.live_machines(), 2);
        let reply = &g.tape(0).unwrap().moves()[1];
        assert_eq!(reply.payload, 1u32.to_be_bytes());
    }

    #[test]
    fn spawn_beyond_budget_depletes() {
        let mut env = Echo;
        let child = Script::new(vec![]).sized(2048);
        let parent = Script::new(vec![Action::Spawn(vec![Box::new(child)])]);
        let out = play(Box::new(parent), &mut env, config(1000.0)).unwrap();
        assert_eq!(out.result, GameResult::LostBudgetDepleted);
        assert_eq!(out.transcript.machines.len(), 1);
        assert_eq!(out.transcript.ledger_total(), 1000.0);
    }

    #[test]
    fn children_share_the_budget_and_default_step_size() {
        let mut env = Echo;
        let child = Script::new(vec![Action::Compute(3)]).sized(100);
        let parent = Script::new(vec![Action::Spawn(vec![Box::new(child)])]).sized(50);
        let out = play(Box::new(parent), &mut env, config(1e6)).unwrap();
        assert_eq!(out.result, GameResult::LostChallengeFailed);
        assert_eq!(out.total_cost, 100.0 + 300.0);
        assert_eq!(out.budget.spent(), out.transcript.ledger_total());
    }

    #[test]
    fn challenge_adjudication() {
        let mut env = Echo;
        let challenge = |b: u8| Action::Move(Move::attacker(MoveClass::Challenge, vec![b]));
        let cfg = config(1e9).with_per_step_information(1.0);
        let mut win = GameConfig { challenge_trials: 8, ..cfg.clone() };
        win.win_threshold = 0.01;
        let out = play(Box::new(Script::new((0..8).map(|_| challenge(1)).collect())), &mut env, win.clone()).unwrap();
        assert_eq!(out.result, GameResult::Won);
        assert_eq!((out.successes, out.trials), (8, 8));
        let mixed = (0..8).map(|i| challenge((i % 2) as u8)).collect();
        let out = play(Box::new(Script::new(mixed)), &mut env, win).unwrap();
        assert_eq!(out.result, GameResult::LostChallengeFailed);
    }

    #[test]
    fn invalid_configs() {
        let mut env = Echo;
        for cfg in [
            GameConfig { challenge_trials: 0, ..config(1.0) },
            config(1.0).with_win_threshold(1.0),
            config(1.0).with_win_threshold(0.0),
            config(1.0).with_chance_probability(0.0),
            config(1.0).with_per_step_information(-1.0),
        ] {
            assert!(matches!(play(Box::new(Script::new(vec![])), &mut env, cfg), Err(GameError::Config(_))));
        }
    }

    struct Rereader;

    impl Strategy for Rereader {
        fn machine_spec(&self) -> MachineSpec {
            MachineSpec::default()
        }

        fn next_action(&mut self, ctx: &mut MachineContext<'_>) -> Action {
            if ctx.tape_len() == 0 {
                return info(b"x");
            }
            ctx.read_at(1);
            ctx.read_at(0);
            Action::Halt
        }
    }

    #[test]
    fn rereading_faults() {
        let mut env = Echo;
        let err = play(Box::new(Rereader), &mut env, config(1e3)).unwrap_err();
        let GameError::Fault(f) = err else { panic!("{err:?}") };
        assert_eq!(f.kind, FaultKind::Tape(TapeViolation::Reread { index: 0, cursor: 2 }));
        assert_eq!(f.round, 1);
    }

    struct Chatty;

    impl Environment for Chatty {
        fn reset(&mut self, _seed: u64) {}

        fn respond(&mut self, _machine: usize, _request: &Move) -> Move {
            Move::response(Vec::new())
        }

        fn unprompted(&mut self, _machine: usize) -> Option<Move> {
            Some(Move::response(b"hello".to_vec()))
        }
    }

    struct Rogue;

    impl Environment for Rogue {
        fn reset(&mut self, _seed: u64) {}

        fn respond(&mut self, _machine: usize, _request: &Move) -> Move {
            Move::attacker(MoveClass::Challenge, Vec::new())
        }
    }

    #[test]
    fn environment_faults() {
        let err = play(Box::new(Script::new(vec![info(b"x")])), &mut Chatty, config(1e3)).unwrap_err();
        assert!(matches!(
            err,
            GameError::Fault(ProtocolFault { kind: FaultKind::Tape(TapeViolation::Unprompted { .. }), .. })
        ));
        let err = play(Box::new(Script::new(vec![info(b"x")])), &mut Rogue, config(1e3)).unwrap_err();
        assert!(matches!(err, GameError::Fault(ProtocolFault { kind: FaultKind::BadReply { .. }, .. })));
    }

    #[test]
    fn attacker_cannot_write_responses() {
        let mut env = Echo;
        let strat = Script::new(vec![Action::Move(Move::response(Vec::new()))]);
        let err = play(Box::new(strat), &mut env, config(1e3)).unwrap_err();
        assert!(matches!(
            err,
            GameError::Fault(ProtocolFault { kind: FaultKind::AttackerClass(MoveClass::Response), .. })
        ));
    }

    #[test]
    fn round_limit() {
        struct Spin;
        impl Strategy for Spin {
            fn machine_spec(&self) -> MachineSpec {
                MachineSpec::default()
            }
            fn next_action(&mut self, _ctx: &mut MachineContext<'_>) -> Action {
                Action::Compute(0)
            }
        }
        let mut env = Echo;
        let err = play(Box::new(Spin), &mut env, config(1.0).with_max_rounds(5)).unwrap_err();
        assert_eq!(err, GameError::RoundLimit(5));
    }

    #[test]
    fn shared_regions_visible_only_when_declared() {
        struct Writer(bool);
        impl Strategy for Writer {
            fn machine_spec(&self) -> MachineSpec {
                MachineSpec::default().with_shared_regions(if self.0 { vec![7] } else { vec![] })
            }
            fn next_action(&mut self, ctx: &mut MachineContext<'_>) -> Action {
                let id = ctx.id() as u8;
                match ctx.shared(7) {
                    Some(r) => r.push(id),
                    None => assert!(!self.0),
                }
                Action::Halt
            }
        }
        struct Parent;
        impl Strategy for Parent {
            fn machine_spec(&self) -> MachineSpec {
                MachineSpec::default().with_shared_regions(vec![7])
            }
            fn next_action(&mut self, ctx: &mut MachineContext<'_>) -> Action {
                if ctx.round() == 0 {
                    Action::Spawn(vec![Box::new(Writer(true)), Box::new(Writer(false)), Box::new(Writer(true))])
                } else {
                    ctx.shared(7).unwrap().push(0xff);
                    Action::Halt
                }
            }
        }
        let mut env = Echo;
        let mut g = Game::new(Box::new(Parent), &mut env, config(1e6).with_valuation(vec![1, 2])).unwrap();
        while g.step().unwrap().is_none() {}
        assert_eq!(g.shared_region(7), Some(&[0xff, 1, 3][..]));
    }
}
