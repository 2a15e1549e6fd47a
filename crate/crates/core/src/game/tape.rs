use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Actor {
    Attacker,
    Environment,
}

impl Actor {
    pub fn as_str(self) -> &'static str {
        match self {
            Actor::Attacker => "attacker",
            Actor::Environment => "environment",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "attacker" => Some(Actor::Attacker),
            "environment" => Some(Actor::Environment),
            _ => None,
        }
    }
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveClass {
    InfoRequest,
    StructuralRequest,
    EncryptionRequest,
    Challenge,
    Response,
    Denial,
}

impl MoveClass {
    pub const ALL: [MoveClass; 6] = [
        MoveClass::InfoRequest,
        MoveClass::StructuralRequest,
        MoveClass::EncryptionRequest,
        MoveClass::Challenge,
        MoveClass::Response,
        MoveClass::Denial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MoveClass::InfoRequest => "info_request",
            MoveClass::StructuralRequest => "structural_request",
            MoveClass::EncryptionRequest => "encryption_request",
            MoveClass::Challenge => "challenge",
            MoveClass::Response => "response",
            MoveClass::Denial => "denial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    /// The four classes an attacker may write.
    pub fn is_request(self) -> bool {
        !matches!(self, MoveClass::Response | MoveClass::Denial)
    }
}

impl fmt::Display for MoveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Move {
    pub actor: Actor,
    pub class: MoveClass,
    pub payload: Vec<u8>,
}

impl Move {
    pub fn attacker(class: MoveClass, payload: impl Into<Vec<u8>>) -> Self {
        Self {
            actor: Actor::Attacker,
            class,
            payload: payload.into(),
        }
    }

    pub fn response(payload: impl Into<Vec<u8>>) -> Self {
        Self {
            actor: Actor::Environment,
            class: MoveClass::Response,
            payload: payload.into(),
        }
    }

    pub fn denial(payload: impl Into<Vec<u8>>) -> Self {
        Self {
            actor: Actor::Environment,
            class: MoveClass::Denial,
            payload: payload.into(),
        }
    }

    /// Payload with its 4-byte big-endian length prefix.
    pub fn framed(&self) -> Vec<u8> {
        frame(&self.payload)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("length prefix needs 4 bytes, found {0}")]
    ShortPrefix(usize),
    #[error("frame declares {declared} bytes but only {available} follow")]
    Truncated { declared: usize, available: usize },
}

pub fn frame(payload: &[u8]) -> Vec<u8> {
    let len = u32::try_from(payload.len()).expect("payload longer than 4 GiB");
    let mut out = Vec::with_capacity(payload.len() + 4);
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(payload);
    out
}

/// Splits one frame off the front of `bytes`, returning `(payload, rest)`.
pub fn parse_framed(bytes: &[u8]) -> Result<(&[u8], &[u8]), FrameError> {
    if bytes.len() < 4 {
        return Err(FrameError::ShortPrefix(bytes.len()));
    }
    let declared = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
    let body = &bytes[4..];
    if body.len() < declared {
        return Err(FrameError::Truncated {
            declared,
            available: body.len(),
        });
    }
    Ok(body.split_at(declared))
}

/// Splits a concatenation of frames. Trailing garbage is an error.
pub fn split_frames(mut bytes: &[u8]) -> Result<Vec<&[u8]>, FrameError> {
    let mut out = Vec::new();
    while !bytes.is_empty() {
        let (payload, rest) = parse_framed(bytes)?;
        out.push(payload);
        bytes = rest;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TapeViolation {
    #[error("environment move at index {index} does not answer an attacker move")]
    Unprompted { index: usize },
    #[error("attacker move at index {index} written before the previous one was answered")]
    Unanswered { index: usize },
    #[error("attacker tried to reread index {index} behind cursor {cursor}")]
    Reread { index: usize, cursor: usize },
}

/// Append-only sequence of moves with a forward-only attacker read head.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunTape {
    moves: Vec<Move>,
    cursor: usize,
}

impl RunTape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn last(&self) -> Option<&Move> {
        self.moves.last()
    }

    /// Appends `mv`, enforcing strict alternation. Returns its index.
    pub fn append(&mut self, mv: Move) -> Result<usize, TapeViolation> {
        let index = self.moves.len();
        let last = self.moves.last().map(|m| m.actor);
        match (mv.actor, last) {
            (Actor::Attacker, Some(Actor::Attacker)) => return Err(TapeViolation::Unanswered { index }),
            (Actor::Environment, None | Some(Actor::Environment)) => {
                return Err(TapeViolation::Unprompted { index })
            }
            _ => {}
        }
        self.moves.push(mv);
        Ok(index)
    }

    /// Next unread move; advances the head.
    pub fn read_next(&mut self) -> Option<&Move> {
        let mv = self.moves.get(self.cursor)?;
        self.cursor += 1;
        Some(mv)
    }

    /// Reads `index`, skipping forward over anything in between.
    pub fn read_at(&mut self, index: usize) -> Result<Option<&Move>, TapeViolation> {
        if index < self.cursor {
            return Err(TapeViolation::Reread {
                index,
                cursor: self.cursor,
            });
        }
        match self.moves.get(index) {
            Some(mv) => {
                self.cursor = index + 1;
                Ok(Some(mv))
            }
            None => Ok(None),
        }
    }

    pub fn unread(&self) -> usize {
        self.moves.len() - self.cursor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn alternation_enforced() {
        let mut t = RunTape::new();
        assert_eq!(t.append(Move::response(vec![])), Err(TapeViolation::Unprompted { index: 0 }));
        t.append(Move::attacker(MoveClass::InfoRequest, b"x".to_vec())).unwrap();
        assert_eq!(
            t.append(Move::attacker(MoveClass::Challenge, vec![])),
            Err(TapeViolation::Unanswered { index: 1 })
        );
        t.append(Move::denial(vec![])).unwrap();
        assert_eq!(t.append(Move::response(vec![])), Err(TapeViolation::Unprompted { index: 2 }));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn read_head_only_moves_forward() {
        let mut t = RunTape::new();
        t.append(Move::attacker(MoveClass::InfoRequest, vec![1])).unwrap();
        t.append(Move::response(vec![2])).unwrap();
        assert_eq!(t.read_at(1).unwrap().unwrap().payload, vec![2]);
        assert_eq!(t.cursor(), 2);
        assert_eq!(t.read_at(0), Err(TapeViolation::Reread { index: 0, cursor: 2 }));
        assert!(t.read_next().is_none());
        assert_eq!(t.read_at(5), Ok(None));
    }

    #[test]
    fn class_names_round_trip() {
        for c in MoveClass::ALL {
            assert_eq!(MoveClass::parse(c.as_str()), Some(c));
        }
        assert_eq!(MoveClass::ALL.iter().filter(|c| c.is_request()).count(), 4);
    }

    #[test]
    fn truncated_frames() {
        assert_eq!(parse_framed(&[0, 0]), Err(FrameError::ShortPrefix(2)));
        assert_eq!(
            parse_framed(&[0, 0, 0, 5, 1]),
            Err(FrameError::Truncated { declared: 5, available: 1 })
        );
    }

    proptest! {
        #[test]
        fn framing_round_trips(parts in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..40), 0..6)) {
            let joined: Vec<u8> = parts.iter().flat_map(|p| frame(p)).collect();
            let split = split_frames(&joined).unwrap();
            prop_assert_eq!(split.len(), parts.len());
            for (a, b) in split.iter().zip(&parts) {
                prop_assert_eq!(*a, b.as_slice());
            }
            let mv = Move::attacker(MoveClass::Challenge, parts.concat());
            let framed = mv.framed();
            let (payload, rest) = parse_framed(&framed).unwrap();
            prop_assert_eq!(payload, mv.payload.as_slice());
            prop_assert!(rest.is_empty());
        }
    }
}
