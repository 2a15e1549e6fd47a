use std::fmt::Write as _;

use thiserror::Error;

use super::engine::{ChargeKind, GameOutcome, GameResult, LedgerEntry};
use super::tape::{parse_framed, Actor, Move, MoveClass};

const HEADER: &str = "# workfunc transcript v1";

fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(2 * bytes.len());
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

fn unhex(s: &str) -> Option<Vec<u8>> {
    if !s.len().is_multiple_of(2) {
        return None;
    }
    (0..s.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
        .collect()
}

fn kind_token(kind: ChargeKind) -> String {
    match kind {
        ChargeKind::Move(c) => format!("move:{c}"),
        ChargeKind::Compute(n) => format!("compute:{n}"),
        ChargeKind::Spawn(n) => format!("spawn:{n}"),
    }
}

fn parse_kind(token: &str) -> Option<ChargeKind> {
    let (tag, arg) = token.split_once(':')?;
    match tag {
        "move" => MoveClass::parse(arg).map(ChargeKind::Move),
        "compute" => arg.parse().ok().map(ChargeKind::Compute),
        "spawn" => arg.parse().ok().map(ChargeKind::Spawn),
        _ => None,
    }
}

/// Line-oriented dump: per machine a `machine` header then one line per move
/// (`<index> <actor> <class> <hex of framed payload>`), then the charge
/// ledger and a summary trailer.
pub fn export_transcript(outcome: &GameOutcome) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for m in &outcome.transcript.machines {
        let parent = m.parent.map_or("-".to_string(), |p| p.to_string());
        let _ = writeln!(
            out,
            "machine {} parent {} born {} description_bytes {}",
            m.id, parent, m.born_round, m.description_bytes
        );
        for (i, mv) in m.tape.moves().iter().enumerate() {
            let _ = writeln!(out, "{i} {} {} {}", mv.actor, mv.class, hex(&mv.framed()));
        }
    }
    out.push_str("ledger\n");
    for e in &outcome.transcript.ledger {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            e.machine,
            e.round,
            kind_token(e.kind),
            e.requested,
            e.charged
        );
    }
    let _ = writeln!(out, "total_cost {}", outcome.total_cost);
    let _ = writeln!(out, "result {}", outcome.result.as_str());
    let _ = writeln!(out, "successes {}/{}", outcome.successes, outcome.trials);
    let _ = writeln!(out, "rounds {}", outcome.rounds);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transcript line {line}: {message}")]
pub struct TranscriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTranscript {
    /// Moves per machine, in machine order.
    pub machines: Vec<Vec<Move>>,
    pub ledger: Vec<LedgerEntry>,
    pub total_cost: f64,
    pub result: GameResult,
    pub successes: u64,
    pub trials: u64,
    pub rounds: u64,
}

impl ParsedTranscript {
    pub fn ledger_total(&self) -> f64 {
        self.ledger.iter().map(|e| e.charged).sum()
    }
}

pub fn parse_transcript(text: &str) -> Result<ParsedTranscript, TranscriptError> {
    let mut machines: Vec<Vec<Move>> = Vec::new();
    let mut ledger = Vec::new();
    let mut in_ledger = false;
    let (mut total_cost, mut result, mut counts, mut rounds) = (None, None, None, None);
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: &str| TranscriptError {
            line: line_no,
            message: message.to_string(),
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "machine" => {
                in_ledger = false;
                machines.push(Vec::new());
            }
            "ledger" => in_ledger = true,
            "total_cost" => total_cost = fields.get(1).and_then(|v| v.parse::<f64>().ok()),
            "result" => result = fields.get(1).and_then(|v| GameResult::parse(v)),
            "successes" => {
                counts = fields.get(1).and_then(|v| {
                    let (s, t) = v.split_once('/')?;
                    Some((s.parse::<u64>().ok()?, t.parse::<u64>().ok()?))
                })
            }
            "rounds" => rounds = fields.get(1).and_then(|v| v.parse::<u64>().ok()),
            _ if in_ledger => {
                let [machine, round, kind, requested, charged] = fields[..] else {
                    return Err(err("ledger line needs 5 fields"));
                };
                ledger.push(LedgerEntry {
                    machine: machine.parse().map_err(|_| err("bad machine id"))?,
                    round: round.parse().map_err(|_| err("bad round"))?,
                    kind: parse_kind(kind).ok_or_else(|| err("bad charge kind"))?,
                    requested: requested.parse().map_err(|_| err("bad requested amount"))?,
                    charged: charged.parse().map_err(|_| err("bad charged amount"))?,
                });
            }
            _ => {
                let [index, actor, class, payload] = fields[..] else {
                    return Err(err("move line needs 4 fields"));
                };
                let tape = machines.last_mut().ok_or_else(|| err("move before machine header"))?;
                if index.parse::<usize>().ok() != Some(tape.len()) {
                    return Err(err("move index out of sequence"));
                }
                let framed = unhex(payload).ok_or_else(|| err("bad hex payload"))?;
                let (body, rest) = parse_framed(&framed).map_err(|e| err(&e.to_string()))?;
                if !rest.is_empty() {
                    return Err(err("payload length prefix does not match payload"));
                }
                tape.push(Move {
                    actor: Actor::parse(actor).ok_or_else(|| err("bad actor"))?,
                    class: MoveClass::parse(class).ok_or_else(|| err("bad move class"))?,
                    payload: body.to_vec(),
                });
            }
        }
    }
    let missing = |what: &str| TranscriptError {
        line: text.lines().count(),
        message: format!("missing {what} trailer"),
    };
    let (successes, trials) = counts.ok_or_else(|| missing("successes"))?;
    Ok(ParsedTranscript {
        machines,
        ledger,
        total_cost: total_cost.ok_or_else(|| missing("total_cost"))?,
        result: result.ok_or_else(|| missing("result"))?,
        successes,
        trials,
        rounds: rounds.ok_or_else(|| missing("rounds"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        assert_eq!(hex(&[0, 0xab, 0x10]), "00ab10");
        assert_eq!(unhex("00ab10"), Some(vec![0, 0xab, 0x10]));
        assert_eq!(unhex("0"), None);
        assert_eq!(unhex("zz"), None);
    }

    #[test]
    fn kind_tokens() {
        for k in [ChargeKind::Move(MoveClass::Challenge), ChargeKind::Compute(7), ChargeKind::Spawn(3)] {
            assert_eq!(parse_kind(&kind_token(k)), Some(k));
        }
    }

    #[test]
    fn malformed_lines_rejected() {
        let bad = "machine 0 parent - born 0 description_bytes 16\n0 attacker challenge 00000002ff\n";
        let e = parse_transcript(bad).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_transcript("machine 0\n").is_err());
    }
}
