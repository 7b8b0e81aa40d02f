//! JSON-lines traces and their replay.
//!
//! A trace file is one JSON object per line: a header (scene, algorithm,
//! scheduler, budget), then one record per event, then a summary. Every event
//! carries a digest of the robot positions after it, so a trace is
//! self-validating: [`replay`] re-executes the recorded event order from the
//! header's scene and verifies that every digest, move, and intent matches.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::Algorithm;
use crate::geometry::Point;
use crate::model::{Configuration, MoveIntent, RobotId, Violation};
use crate::scene::{Scene, SceneError};

use super::{look_pair, step_sync, EngineError, SchedulerKind};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot read trace: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace line {line}: not a valid record: {source}")]
    Malformed {
        line: usize,
        source: serde_json::Error,
    },
    #[error("trace must start with a header line")]
    MissingHeader,
    #[error("trace line {0}: unexpected second header")]
    DuplicateHeader(usize),
    #[error("trace line {0}: record after the summary")]
    RecordAfterSummary(usize),
    #[error("trace ends without a summary line")]
    MissingSummary,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("replay event {index}: expected digest {expected}, recomputed {actual}")]
    DigestMismatch {
        index: usize,
        expected: String,
        actual: String,
    },
    #[error("replay event {index}: recorded {what} do not match recomputation")]
    RecordMismatch { index: usize, what: &'static str },
    #[error("replay event {index}: event indices out of order (expected {expected})")]
    IndexOutOfOrder { index: usize, expected: usize },
    #[error("replay event {index}: pair {pair} has no pending activation to move")]
    MoveWithoutLook { index: usize, pair: usize },
    #[error("replay event {index}: pair {pair} looked again before moving")]
    LookWhilePending { index: usize, pair: usize },
    #[error("replay: header scene is invalid: {0}")]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// First line of a trace: everything needed to reproduce the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceHeader {
    pub version: u32,
    pub algorithm: Algorithm,
    pub scheduler: SchedulerKind,
    pub max_events: usize,
    pub scene: Scene,
}

/// One applied relocation, for human consumption; replay re-derives it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub robot: RobotId,
    pub from: Point,
    pub to: Point,
}

/// A pair read the configuration and stored its two intents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LookEvent {
    pub index: usize,
    pub pair: usize,
    pub intents: Vec<MoveIntent>,
    pub digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A pair applied its stored intents, however stale, as one atomic event.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveEvent {
    pub index: usize,
    pub pair: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<MoveRecord>,
    pub digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Every active pair completed a full look-compute-move cycle at once.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyncRoundEvent {
    pub index: usize,
    pub active: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<MoveRecord>,
    pub digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TraceEvent {
    Look(LookEvent),
    Move(MoveEvent),
    SyncRound(SyncRoundEvent),
}

impl TraceEvent {
    pub fn index(&self) -> usize {
        match self {
            TraceEvent::Look(e) => e.index,
            TraceEvent::Move(e) => e.index,
            TraceEvent::SyncRound(e) => e.index,
        }
    }

    pub fn digest(&self) -> &str {
        match self {
            TraceEvent::Look(e) => &e.digest,
            TraceEvent::Move(e) => &e.digest,
            TraceEvent::SyncRound(e) => &e.digest,
        }
    }

    pub fn violations(&self) -> &[Violation] {
        match self {
            TraceEvent::Look(_) => &[],
            TraceEvent::Move(e) => &e.violations,
            TraceEvent::SyncRound(e) => &e.violations,
        }
    }

    pub fn moves(&self) -> &[MoveRecord] {
        match self {
            TraceEvent::Look(_) => &[],
            TraceEvent::Move(e) => &e.moves,
            TraceEvent::SyncRound(e) => &e.moves,
        }
    }
}

/// Last line of a trace. `checks` holds the results of any checkers the
/// caller ran on the finished trace.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TraceSummary {
    pub events: usize,
    pub terminated: bool,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub checks: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Line {
    Header(TraceHeader),
    Look(LookEvent),
    Move(MoveEvent),
    SyncRound(SyncRoundEvent),
    Summary(TraceSummary),
}

/// A complete run record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<TraceEvent>,
    pub summary: TraceSummary,
}

impl Trace {
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut emit = |line: &Line| -> std::io::Result<()> {
            serde_json::to_writer(&mut w, line).map_err(std::io::Error::other)?;
            w.write_all(b"\n")
        };
        emit(&Line::Header(self.header.clone()))?;
        for ev in &self.events {
            let line = match ev.clone() {
                TraceEvent::Look(e) => Line::Look(e),
                TraceEvent::Move(e) => Line::Move(e),
                TraceEvent::SyncRound(e) => Line::SyncRound(e),
            };
            emit(&line)?;
        }
        emit(&Line::Summary(self.summary.clone()))
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("traces are UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, TraceError> {
        let mut header = None;
        let mut events = Vec::new();
        let mut summary = None;
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = i + 1;
            if summary.is_some() {
                return Err(TraceError::RecordAfterSummary(lineno));
            }
            let parsed: Line = serde_json::from_str(&line).map_err(|source| {
                TraceError::Malformed {
                    line: lineno,
                    source,
                }
            })?;
            match parsed {
                Line::Header(h) => {
                    if header.is_some() {
                        return Err(TraceError::DuplicateHeader(lineno));
                    }
                    header = Some(h);
                }
                Line::Summary(s) => summary = Some(s),
                event => {
                    if header.is_none() {
                        return Err(TraceError::MissingHeader);
                    }
                    events.push(match event {
                        Line::Look(e) => TraceEvent::Look(e),
                        Line::Move(e) => TraceEvent::Move(e),
                        Line::SyncRound(e) => TraceEvent::SyncRound(e),
                        Line::Header(_) | Line::Summary(_) => unreachable!(),
                    });
                }
            }
        }
        Ok(Trace {
            header: header.ok_or(TraceError::MissingHeader)?,
            events,
            summary: summary.ok_or(TraceError::MissingSummary)?,
        })
    }

    pub fn from_jsonl_str(s: &str) -> Result<Self, TraceError> {
        Trace::read_jsonl(s.as_bytes())
    }
}

/// The configurations a trace passes through: `configs[i]` holds after event
/// `i`, `initial` before any event.
#[derive(Debug, Clone)]
pub struct Replay {
    pub initial: Configuration,
    pub configs: Vec<Configuration>,
}

impl Replay {
    /// Configuration after `frame` events; frame 0 is the initial scene.
    pub fn frame(&self, frame: usize) -> Option<&Configuration> {
        if frame == 0 {
            Some(&self.initial)
        } else {
            self.configs.get(frame - 1)
        }
    }

    pub fn frames(&self) -> usize {
        self.configs.len() + 1
    }

    pub fn last(&self) -> &Configuration {
        self.configs.last().unwrap_or(&self.initial)
    }
}

/// Re-executes the recorded event order from the header scene, verifying
/// every digest, intent list, move list, and violation list along the way.
pub fn replay(trace: &Trace) -> Result<Replay, ReplayError> {
    let initial = trace.header.scene.to_configuration()?;
    let algo = trace.header.algorithm;
    let mut c = initial.clone();
    let mut pending: Vec<Option<[MoveIntent; 2]>> = vec![None; c.n_pairs()];
    let mut configs = Vec::with_capacity(trace.events.len());

    for (expected, ev) in trace.events.iter().enumerate() {
        let index = ev.index();
        if index != expected {
            return Err(ReplayError::IndexOutOfOrder { index, expected });
        }
        match ev {
            TraceEvent::Look(e) => {
                if pending[e.pair].is_some() {
                    return Err(ReplayError::LookWhilePending {
                        index,
                        pair: e.pair,
                    });
                }
                let look = look_pair(&c, &algo, e.pair)?;
                if look.intents.to_vec() != e.intents {
                    return Err(ReplayError::RecordMismatch {
                        index,
                        what: "intents",
                    });
                }
                pending[e.pair] = Some(look.intents);
            }
            TraceEvent::Move(e) => {
                let intents = pending[e.pair].take().ok_or(ReplayError::MoveWithoutLook {
                    index,
                    pair: e.pair,
                })?;
                let moves = move_records(&c, &intents)?;
                let (next, violations) = c.apply_moves(&intents).map_err(EngineError::from)?;
                if moves != e.moves {
                    return Err(ReplayError::RecordMismatch {
                        index,
                        what: "moves",
                    });
                }
                if violations != e.violations {
                    return Err(ReplayError::RecordMismatch {
                        index,
                        what: "violations",
                    });
                }
                c = next;
            }
            TraceEvent::SyncRound(e) => {
                let step = step_sync(&c, &algo, &e.active)?;
                if step.moves != e.moves {
                    return Err(ReplayError::RecordMismatch {
                        index,
                        what: "moves",
                    });
                }
                if step.violations != e.violations {
                    return Err(ReplayError::RecordMismatch {
                        index,
                        what: "violations",
                    });
                }
                c = step.next;
            }
        }
        let actual = c.digest();
        if actual != ev.digest() {
            return Err(ReplayError::DigestMismatch {
                index,
                expected: ev.digest().to_string(),
                actual,
            });
        }
        configs.push(c.clone());
    }
    Ok(Replay { initial, configs })
}

/// From/to records for the non-stay intents of one atomic event.
pub(super) fn move_records(
    c: &Configuration,
    intents: &[MoveIntent],
) -> Result<Vec<MoveRecord>, EngineError> {
    let mut out = Vec::new();
    for m in intents {
        if m.is_stay() {
            continue;
        }
        let from = c.position(m.mover).map_err(EngineError::from)?;
        out.push(MoveRecord {
            robot: m.mover,
            from,
            to: from.step(m.target),
        });
    }
    Ok(out)
}
