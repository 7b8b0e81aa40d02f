//! Exhaustive exploration of asynchronous interleavings.
//!
//! A scheduler state is the robot positions plus, per pair, the pending
//! intents stored at its last Look (if any). From each state every pair
//! contributes exactly one successor — Look when idle, Move when pending —
//! so breadth-first search over these states covers every asynchronous
//! interleaving up to the depth bound, including every way a Move can act on
//! a stale snapshot. States are deduplicated exactly (positions and pending
//! intents); no symmetry reduction is applied.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algorithms::Algorithm;
use crate::model::{Configuration, MoveIntent};

use super::{look_pair, EngineError};

#[derive(Debug, Clone)]
pub struct ExploreConfig {
    pub algorithm: Algorithm,
    /// Maximum number of events along any explored interleaving.
    pub depth: usize,
    /// Hard cap on stored states; hitting it truncates the search and is
    /// reported as such.
    pub max_states: usize,
    /// Worker threads for frontier expansion; 1 explores sequentially. The
    /// result is the same either way, only the wall time differs.
    pub jobs: usize,
}

impl ExploreConfig {
    pub fn new(algorithm: Algorithm, depth: usize) -> Self {
        ExploreConfig {
            algorithm,
            depth,
            max_states: 4_000_000,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Look,
    Move,
}

/// One edge of a counterexample path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreStep {
    pub pair: usize,
    pub kind: StepKind,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExploreReport {
    /// Distinct states reached (including the initial one).
    pub states: usize,
    /// Deepest level reached (events along the longest stored path).
    pub max_depth_reached: usize,
    /// True when every state up to the depth bound was visited.
    pub complete: bool,
    /// True when the state cap cut the search short.
    pub truncated_by_state_cap: bool,
    /// States whose configuration violates a safety property.
    pub safety_violating_states: usize,
    /// States whose configuration fails the caller's predicate.
    pub predicate_violating_states: usize,
    /// States with no pending activation and no enabled rule.
    pub terminal_states: usize,
    /// Event path from the initial state to the first safety violation met
    /// in search order.
    pub first_safety_counterexample: Option<Vec<ExploreStep>>,
    /// Event path to the first predicate violation met in search order.
    pub first_predicate_counterexample: Option<Vec<ExploreStep>>,
}

type Pending = Vec<Option<[MoveIntent; 2]>>;

#[derive(Clone, PartialEq, Eq, Hash)]
struct StateKey {
    positions: Vec<crate::geometry::Point>,
    pending: Pending,
}

struct StateNode {
    key: StateKey,
    parent: Option<(usize, ExploreStep)>,
}

/// Explores every asynchronous interleaving of `initial` up to
/// `cfg.depth` events, checking safety everywhere and `predicate` (when
/// given) on every distinct state.
pub fn explore(
    initial: &Configuration,
    cfg: &ExploreConfig,
    predicate: Option<&(dyn Fn(&Configuration) -> bool + Sync)>,
) -> Result<ExploreReport, EngineError> {
    if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| EngineError::Parallel(e.to_string()))?;
        pool.install(|| explore_inner(initial, cfg, predicate, true))
    } else {
        explore_inner(initial, cfg, predicate, false)
    }
}

fn explore_inner(
    initial: &Configuration,
    cfg: &ExploreConfig,
    predicate: Option<&(dyn Fn(&Configuration) -> bool + Sync)>,
    parallel: bool,
) -> Result<ExploreReport, EngineError> {
    let n_pairs = initial.n_pairs();
    let object = initial.object().clone();
    let head = initial.head_pair();
    let algo = cfg.algorithm;

    let as_config = |key: &StateKey| -> Configuration {
        Configuration::new(key.positions.clone(), object.clone(), head)
            .expect("explored states preserve the robot count")
    };

    let mut report = ExploreReport {
        complete: true,
        ..ExploreReport::default()
    };
    let mut nodes: Vec<StateNode> = Vec::new();
    let mut seen: HashMap<StateKey, usize> = HashMap::new();

    let root = StateKey {
        positions: initial.positions().to_vec(),
        pending: vec![None; n_pairs],
    };
    seen.insert(root.clone(), 0);
    nodes.push(StateNode {
        key: root,
        parent: None,
    });

    let path_to = |nodes: &[StateNode], mut idx: usize| -> Vec<ExploreStep> {
        let mut path = Vec::new();
        while let Some((parent, step)) = nodes[idx].parent {
            path.push(step);
            idx = parent;
        }
        path.reverse();
        path
    };

    // Evaluate a newly stored state; index is its position in `nodes`.
    let evaluate = |nodes: &[StateNode],
                    report: &mut ExploreReport,
                    idx: usize|
     -> Result<(), EngineError> {
        let key = &nodes[idx].key;
        let config = as_config(key);
        if !config.safety_violations().is_empty() {
            report.safety_violating_states += 1;
            if report.first_safety_counterexample.is_none() {
                report.first_safety_counterexample = Some(path_to(nodes, idx));
            }
        }
        if let Some(pred) = predicate {
            if !pred(&config) {
                report.predicate_violating_states += 1;
                if report.first_predicate_counterexample.is_none() {
                    report.first_predicate_counterexample = Some(path_to(nodes, idx));
                }
            }
        }
        if key.pending.iter().all(Option::is_none) {
            let mut terminal = true;
            for pair in 0..n_pairs {
                if look_pair(&config, &algo, pair)?
                    .intents
                    .iter()
                    .any(|m| !m.is_stay())
                {
                    terminal = false;
                    break;
                }
            }
            if terminal {
                report.terminal_states += 1;
            }
        }
        Ok(())
    };

    evaluate(&nodes, &mut report, 0)?;

    let expand = |key: &StateKey| -> Result<Vec<(ExploreStep, StateKey)>, EngineError> {
        let config = as_config(key);
        let mut out = Vec::with_capacity(n_pairs);
        for pair in 0..n_pairs {
            match &key.pending[pair] {
                None => {
                    let look = look_pair(&config, &algo, pair)?;
                    let mut pending = key.pending.clone();
                    pending[pair] = Some(look.intents);
                    out.push((
                        ExploreStep {
                            pair,
                            kind: StepKind::Look,
                        },
                        StateKey {
                            positions: key.positions.clone(),
                            pending,
                        },
                    ));
                }
                Some(intents) => {
                    let (next, _) = config.apply_moves(intents)?;
                    let mut pending = key.pending.clone();
                    pending[pair] = None;
                    out.push((
                        ExploreStep {
                            pair,
                            kind: StepKind::Move,
                        },
                        StateKey {
                            positions: next.positions().to_vec(),
                            pending,
                        },
                    ));
                }
            }
        }
        Ok(out)
    };

    let mut frontier: Vec<usize> = vec![0];
    'depth: for depth in 0..cfg.depth {
        if frontier.is_empty() {
            break;
        }
        report.max_depth_reached = depth;
        let expansions: Vec<Result<Vec<(ExploreStep, StateKey)>, EngineError>> = if parallel {
            use rayon::prelude::*;
            frontier
                .par_iter()
                .map(|&idx| expand(&nodes[idx].key))
                .collect()
        } else {
            frontier.iter().map(|&idx| expand(&nodes[idx].key)).collect()
        };

        let mut next_frontier = Vec::new();
        for (&parent, expansion) in frontier.iter().zip(expansions) {
            for (step, key) in expansion? {
                match seen.entry(key) {
                    Entry::Occupied(_) => {}
                    Entry::Vacant(slot) => {
                        if nodes.len() >= cfg.max_states {
                            report.truncated_by_state_cap = true;
                            report.complete = false;
                            break 'depth;
                        }
                        let idx = nodes.len();
                        let key = slot.key().clone();
                        slot.insert(idx);
                        nodes.push(StateNode {
                            key,
                            parent: Some((parent, step)),
                        });
                        evaluate(&nodes, &mut report, idx)?;
                        next_frontier.push(idx);
                    }
                }
            }
        }
        if !next_frontier.is_empty() {
            report.max_depth_reached = depth + 1;
        }
        frontier = next_frontier;
    }

    report.states = nodes.len();
    Ok(report)
}
