//! The JSON scene format and its validating loader.
//!
//! A scene lists robot pairs by the two points they occupy, plus the object
//! point set:
//!
//! ```json
//! {
//!   "pairs": [
//!     { "a": [0, 0], "b": [0, 0] },
//!     { "a": [1, 0], "b": [2, 0], "head": true }
//!   ],
//!   "object": [[5, 0], [6, 0]]
//! }
//! ```
//!
//! `a` and `b` must coincide (Short) or be adjacent (Long). At most one pair
//! may carry `"head": true`; the coating algorithm requires it, marching
//! ignores it. Loading validates everything a user can get wrong; the engine
//! afterwards assumes a well-formed starting configuration.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{dist, neighbors, Point};
use crate::model::{Configuration, ModelError};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read scene file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scene is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("pair {pair} spans points {span} apart; buddies must share a point or be adjacent")]
    PairTooSpread { pair: usize, span: u64 },
    #[error("point [{x}, {y}] hosts {count} robots; at most two are allowed", x = .point.x, y = .point.y)]
    TooManyRobots { point: Point, count: usize },
    #[error("pair {pair} stands on object point [{x}, {y}]", x = .point.x, y = .point.y)]
    RobotOnObject { pair: usize, point: Point },
    #[error("object is not connected ([{x}, {y}] is unreachable from [{fx}, {fy}])",
            x = .stranded.x, y = .stranded.y, fx = .first.x, fy = .first.y)]
    ObjectDisconnected { first: Point, stranded: Point },
    #[error("pairs {first} and {second} both claim the head flag; at most one may")]
    MultipleHeads { first: usize, second: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One pair of robots: the points of its two buddies and an optional head
/// flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenePair {
    pub a: Point,
    pub b: Point,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub head: bool,
}

/// A parsed scene file. Parsing and validation are separate: `Scene` holds
/// whatever the JSON said, [`Scene::to_configuration`] enforces the rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scene {
    pub pairs: Vec<ScenePair>,
    #[serde(default)]
    pub object: Vec<Point>,
}

impl Scene {
    pub fn from_json_str(s: &str) -> Result<Self, SceneError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, SceneError> {
        Scene::from_json_str(&fs::read_to_string(path)?)
    }

    /// The index of the pair flagged as head, if any.
    pub fn head_pair(&self) -> Option<usize> {
        self.pairs.iter().position(|p| p.head)
    }

    /// Validates the scene and builds the starting configuration.
    ///
    /// Rejected: pairs spread more than one point apart, more than two robots
    /// on a point, robots standing on the object, a disconnected object, and
    /// more than one head flag. Duplicate object points are merged.
    pub fn to_configuration(&self) -> Result<Configuration, SceneError> {
        let object: BTreeSet<Point> = self.object.iter().copied().collect();

        let mut head = None;
        for (pair, spec) in self.pairs.iter().enumerate() {
            let span = dist(spec.a, spec.b);
            if span > 1 {
                return Err(SceneError::PairTooSpread { pair, span });
            }
            for p in [spec.a, spec.b] {
                if object.contains(&p) {
                    return Err(SceneError::RobotOnObject { pair, point: p });
                }
            }
            if spec.head {
                match head {
                    None => head = Some(pair),
                    Some(first) => {
                        return Err(SceneError::MultipleHeads {
                            first,
                            second: pair,
                        })
                    }
                }
            }
        }

        let mut positions = Vec::with_capacity(self.pairs.len() * 2);
        for spec in &self.pairs {
            positions.push(spec.a);
            positions.push(spec.b);
        }
        let mut counts: std::collections::BTreeMap<Point, usize> = Default::default();
        for p in &positions {
            *counts.entry(*p).or_insert(0) += 1;
        }
        if let Some((point, count)) = counts.into_iter().find(|(_, c)| *c > 2) {
            return Err(SceneError::TooManyRobots { point, count });
        }

        if let Some(first) = object.iter().next().copied() {
            let mut seen = BTreeSet::from([first]);
            let mut frontier = vec![first];
            while let Some(p) = frontier.pop() {
                for n in neighbors(p) {
                    if object.contains(&n) && seen.insert(n) {
                        frontier.push(n);
                    }
                }
            }
            if let Some(stranded) = object.iter().find(|p| !seen.contains(p)) {
                return Err(SceneError::ObjectDisconnected {
                    first,
                    stranded: *stranded,
                });
            }
        }

        Ok(Configuration::new(positions, object, head)?)
    }
}
