//! Schedulers and the run loop.
//!
//! An activation of a pair has two phases. *Look*: both robots of the pair
//! snapshot the configuration simultaneously and compute their intents.
//! *Move*: the stored intents are applied as one indivisible event — without
//! re-reading the configuration, so intents computed from a stale view are
//! applied verbatim. The move itself is never split: no robot is ever
//! observable mid-relocation.
//!
//! Schedulers differ only in how they interleave activations:
//!
//! * [`SchedulerKind::FSync`] — every pair runs a full look-compute-move
//!   cycle each round.
//! * [`SchedulerKind::SSync`] — a random non-empty subset of pairs runs full
//!   cycles each round; a round with the full set is exactly an FSync round.
//! * [`SchedulerKind::AsyncRandom`] — one pair at a time takes its next
//!   phase (Look when idle, Move when an activation is pending), chosen
//!   uniformly at random, so Moves can act on arbitrarily stale snapshots.
//!
//! The exhaustive interleaving explorer for the asynchronous model lives in
//! [`explore`]. All randomness is drawn from a ChaCha12 stream seeded with
//! the run's `seed`, which is stable across platforms and releases.

pub mod explore;
pub mod trace;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::Algorithm;
use crate::model::{Configuration, ModelError, MoveIntent, MoveKind, RobotId, Violation};
use crate::scene::{Scene, SceneError};

pub use explore::{explore, ExploreConfig, ExploreReport, ExploreStep, StepKind};
pub use trace::{
    replay, LookEvent, MoveEvent, MoveRecord, Replay, ReplayError, SyncRoundEvent, Trace,
    TraceError, TraceEvent, TraceHeader, TraceSummary,
};

use trace::move_records;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("scene rejected: {0}")]
    Scene(#[from] SceneError),
    #[error("robot {robot} computed a close-up toward label {target} but its buddy is at label {buddy}")]
    IntentContract {
        robot: RobotId,
        target: u8,
        buddy: u8,
    },
    #[error("cannot start worker threads: {0}")]
    Parallel(String),
}

/// Which adversary interleaves the activations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SchedulerKind {
    FSync,
    SSync { seed: u64, activation: f64 },
    AsyncRandom { seed: u64 },
}

impl SchedulerKind {
    /// SSync with the default per-pair activation probability of one half.
    pub fn ssync(seed: u64) -> Self {
        SchedulerKind::SSync {
            seed,
            activation: 0.5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::FSync => "fsync",
            SchedulerKind::SSync { .. } => "ssync",
            SchedulerKind::AsyncRandom { .. } => "async-random",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub scheduler: SchedulerKind,
    /// Budget: number of events (rounds for the synchronous schedulers,
    /// Look/Move phases for the asynchronous one).
    pub max_events: usize,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub trace: Trace,
    pub final_config: Configuration,
    /// Whether the run reached a state in which no robot has an enabled
    /// rule (with no activation pending) before the budget ran out.
    pub terminated: bool,
    /// Total safety violations recorded across all events.
    pub violations: usize,
}

/// The Look phase of one pair: both robots snapshot the same configuration
/// and compute their intents independently.
#[derive(Debug, Clone)]
pub struct PairLook {
    pub intents: [MoveIntent; 2],
    /// Diagnostics worth surfacing in traces: several rules enabled at once,
    /// or a direction choice that depends on the tie-break scan order.
    pub notes: Vec<String>,
}

/// Runs Look for `pair`. An exclusive move out of Short is assigned to the
/// pair's even-indexed robot — both robots see identical snapshots and
/// compute the same thing, and exactly one of them may actually move.
pub fn look_pair(
    c: &Configuration,
    algo: &Algorithm,
    pair: usize,
) -> Result<PairLook, EngineError> {
    let robots = [2 * pair, 2 * pair + 1];
    let mut intents = [MoveIntent::stay(robots[0]), MoveIntent::stay(robots[1])];
    let mut notes = Vec::new();
    for (slot, &robot) in robots.iter().enumerate() {
        let s = c.take_snapshot(robot)?;
        let enabled = algo.enabled_rules(&s);
        if enabled.len() > 1 {
            notes.push(format!(
                "robot {robot}: rules {enabled:?} enabled together; first fires"
            ));
        }
        if algo.scan_order_sensitive(&s) {
            notes.push(format!(
                "robot {robot}: direction choice depends on the scan order"
            ));
        }
        let Some(m) = algo.compute(&s) else {
            continue;
        };
        match m.kind {
            MoveKind::ExclusiveFromShort => {
                if robot % 2 == 0 {
                    intents[slot] = m.into_intent(robot);
                }
            }
            MoveKind::CloseUpFromLong => {
                if m.target != s.buddy() {
                    return Err(EngineError::IntentContract {
                        robot,
                        target: m.target.value(),
                        buddy: s.buddy().value(),
                    });
                }
                intents[slot] = m.into_intent(robot);
            }
            MoveKind::Stay => unreachable!("compute signals stay by returning None"),
        }
    }
    Ok(PairLook { intents, notes })
}

/// One synchronous round: every pair in `active` runs a full activation
/// against the same starting configuration, and all moves land at once.
#[derive(Debug)]
pub struct SyncStep {
    pub next: Configuration,
    pub moves: Vec<MoveRecord>,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

pub fn step_sync(
    c: &Configuration,
    algo: &Algorithm,
    active: &[usize],
) -> Result<SyncStep, EngineError> {
    let mut intents = Vec::with_capacity(active.len() * 2);
    let mut notes = Vec::new();
    for &pair in active {
        let look = look_pair(c, algo, pair)?;
        intents.extend_from_slice(&look.intents);
        notes.extend(look.notes);
    }
    let moves = move_records(c, &intents)?;
    let (next, violations) = c.apply_moves(&intents)?;
    Ok(SyncStep {
        next,
        moves,
        violations,
        notes,
    })
}

/// Whether no robot has an enabled rule: fresh snapshots for every pair all
/// compute stays. Meaningful when no activation is pending.
pub fn is_terminated(c: &Configuration, algo: &Algorithm) -> Result<bool, EngineError> {
    for pair in 0..c.n_pairs() {
        let look = look_pair(c, algo, pair)?;
        if look.intents.iter().any(|m| !m.is_stay()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Executes `scene` under the given algorithm and scheduler until the budget
/// is spent or no rule is enabled anywhere, recording every event.
pub fn run(scene: &Scene, cfg: &RunConfig) -> Result<RunOutcome, EngineError> {
    let initial = scene.to_configuration()?;
    let n_pairs = initial.n_pairs();
    let algo = cfg.algorithm;
    let mut c = initial;
    let mut events: Vec<TraceEvent> = Vec::new();
    let mut violations_total = 0usize;
    let mut terminated = false;

    match cfg.scheduler {
        SchedulerKind::FSync => {
            let all: Vec<usize> = (0..n_pairs).collect();
            for index in 0..cfg.max_events {
                if is_terminated(&c, &algo)? {
                    terminated = true;
                    break;
                }
                let step = step_sync(&c, &algo, &all)?;
                violations_total += step.violations.len();
                events.push(TraceEvent::SyncRound(SyncRoundEvent {
                    index,
                    active: all.clone(),
                    moves: step.moves,
                    digest: step.next.digest(),
                    violations: step.violations,
                    notes: step.notes,
                }));
                c = step.next;
            }
        }
        SchedulerKind::SSync { seed, activation } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for index in 0..cfg.max_events {
                if is_terminated(&c, &algo)? {
                    terminated = true;
                    break;
                }
                // Draw per-pair coins until the active set is non-empty; an
                // adversary that activates nobody would just stop time.
                let active = loop {
                    let active: Vec<usize> =
                        (0..n_pairs).filter(|_| rng.random_bool(activation)).collect();
                    if !active.is_empty() {
                        break active;
                    }
                };
                let step = step_sync(&c, &algo, &active)?;
                violations_total += step.violations.len();
                events.push(TraceEvent::SyncRound(SyncRoundEvent {
                    index,
                    active,
                    moves: step.moves,
                    digest: step.next.digest(),
                    violations: step.violations,
                    notes: step.notes,
                }));
                c = step.next;
            }
        }
        SchedulerKind::AsyncRandom { seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut pending: Vec<Option<[MoveIntent; 2]>> = vec![None; n_pairs];
            for index in 0..cfg.max_events {
                if pending.iter().all(Option::is_none) && is_terminated(&c, &algo)? {
                    terminated = true;
                    break;
                }
                let pair = rng.random_range(0..n_pairs);
                match pending[pair].take() {
                    None => {
                        let look = look_pair(&c, &algo, pair)?;
                        events.push(TraceEvent::Look(LookEvent {
                            index,
                            pair,
                            intents: look.intents.to_vec(),
                            digest: c.digest(),
                            notes: look.notes,
                        }));
                        pending[pair] = Some(look.intents);
                    }
                    Some(intents) => {
                        let moves = move_records(&c, &intents)?;
                        let (next, violations) = c.apply_moves(&intents)?;
                        violations_total += violations.len();
                        events.push(TraceEvent::Move(MoveEvent {
                            index,
                            pair,
                            moves,
                            digest: next.digest(),
                            violations,
                            notes: Vec::new(),
                        }));
                        c = next;
                    }
                }
            }
            if !terminated && pending.iter().all(Option::is_none) {
                terminated = is_terminated(&c, &algo)?;
            }
        }
    }
    if !terminated && !matches!(cfg.scheduler, SchedulerKind::AsyncRandom { .. }) {
        terminated = is_terminated(&c, &algo)?;
    }

    let summary = TraceSummary {
        events: events.len(),
        terminated,
        violations: violations_total,
        checks: serde_json::Map::new(),
    };
    Ok(RunOutcome {
        trace: Trace {
            header: TraceHeader {
                version: 1,
                algorithm: algo,
                scheduler: cfg.scheduler,
                max_events: cfg.max_events,
                scene: scene.clone(),
            },
            events,
            summary,
        },
        final_config: c,
        terminated,
        violations: violations_total,
    })
}
