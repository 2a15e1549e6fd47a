use std::collections::BTreeMap;

use super::tape::{frame, Move, RunTape, TapeViolation};

/// Everything needed to start a machine: program, initial work tape, head
/// positions and the shared work-tape regions it may touch.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MachineSpec {
    pub program: Vec<u8>,
    pub work_tape: Vec<u8>,
    pub heads: Vec<u64>,
    pub shared_regions: Vec<u32>,
}

impl MachineSpec {
    pub fn new(program: impl Into<Vec<u8>>) -> Self {
        Self {
            program: program.into(),
            ..Self::default()
        }
    }

    pub fn with_work_tape(mut self, work_tape: impl Into<Vec<u8>>) -> Self {
        self.work_tape = work_tape.into();
        self
    }

    pub fn with_heads(mut self, heads: Vec<u64>) -> Self {
        self.heads = heads;
        self
    }

    pub fn with_shared_regions(mut self, regions: Vec<u32>) -> Self {
        self.shared_regions = regions;
        self
    }

    /// The four sections, each length-prefixed.
    pub fn description(&self) -> Vec<u8> {
        let heads: Vec<u8> = self.heads.iter().flat_map(|h| h.to_be_bytes()).collect();
        let regions: Vec<u8> = self.shared_regions.iter().flat_map(|r| r.to_be_bytes()).collect();
        let mut out = frame(&self.program);
        out.extend(frame(&self.work_tape));
        out.extend(frame(&heads));
        out.extend(frame(&regions));
        out
    }

    pub fn description_bytes(&self) -> u64 {
        (16 + self.program.len() + self.work_tape.len() + 8 * self.heads.len() + 4 * self.shared_regions.len())
            as u64
    }
}

/// What a machine does with one step.
pub enum Action {
    /// Write a request on the run tape.
    Move(Move),
    /// Internal work that leaves the run tape untouched.
    Compute(u64),
    /// Recruit new machines with one structural request.
    Spawn(Vec<Box<dyn Strategy>>),
    Halt,
}

impl std::fmt::Debug for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Action::Move(m) => f.debug_tuple("Move").field(m).finish(),
            Action::Compute(n) => f.debug_tuple("Compute").field(n).finish(),
            Action::Spawn(v) => write!(f, "Spawn({} machines)", v.len()),
            Action::Halt => f.write_str("Halt"),
        }
    }
}

pub trait Strategy {
    fn machine_spec(&self) -> MachineSpec;

    fn next_action(&mut self, ctx: &mut MachineContext<'_>) -> Action;
}

/// A machine's view of the game during one of its steps.
pub struct MachineContext<'a> {
    pub(crate) id: usize,
    pub(crate) round: u64,
    pub(crate) tape: &'a mut RunTape,
    pub(crate) valuation: &'a [u8],
    pub(crate) work_tape: &'a mut Vec<u8>,
    pub(crate) shared: &'a mut BTreeMap<u32, Vec<u8>>,
    pub(crate) regions: &'a [u32],
    pub(crate) violation: Option<TapeViolation>,
}

impl<'a> MachineContext<'a> {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn read_next(&mut self) -> Option<Move> {
        self.tape.read_next().cloned()
    }

    /// Next unread environment move, skipping the machine's own requests.
    pub fn read_next_reply(&mut self) -> Option<Move> {
        while let Some(mv) = self.tape.read_next() {
            if mv.actor == super::Actor::Environment {
                return Some(mv.clone());
            }
        }
        None
    }

    /// Reading behind the head is recorded and faults the game.
    pub fn read_at(&mut self, index: usize) -> Option<Move> {
        match self.tape.read_at(index) {
            Ok(mv) => mv.cloned(),
            Err(v) => {
                self.violation.get_or_insert(v);
                None
            }
        }
    }

    pub fn tape_len(&self) -> usize {
        self.tape.len()
    }

    pub fn unread(&self) -> usize {
        self.tape.unread()
    }

    pub fn valuation(&self) -> &[u8] {
        self.valuation
    }

    pub fn work_tape(&mut self) -> &mut Vec<u8> {
        self.work_tape
    }

    /// A shared region declared in this machine's spec.
    pub fn shared(&mut self, region: u32) -> Option<&mut Vec<u8>> {
        if self.regions.contains(&region) {
            self.shared.get_mut(&region)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tape::split_frames;

    #[test]
    fn description_length_matches() {
        let spec = MachineSpec::new(vec![7u8; 1000])
            .with_work_tape(vec![1, 2, 3])
            .with_heads(vec![0, 5])
            .with_shared_regions(vec![9]);
        assert_eq!(spec.description().len() as u64, spec.description_bytes());
        let description = spec.description();
        let parts = split_frames(&description).unwrap();
        assert_eq!(parts.len(), 4);
        assert_eq!(parts[1], &[1, 2, 3]);
        assert_eq!(MachineSpec::default().description_bytes(), 16);
    }
}
