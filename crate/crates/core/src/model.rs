//! Configurations of pairbots, the local snapshots robots observe, and the
//! move intents they produce.
//!
//! A configuration stores one point per robot plus the static object point
//! set. Robots with indices `2k` and `2k + 1` form pair `k`; the indices are
//! bookkeeping for the engine only and are invisible to the algorithms, which
//! see nothing but a [`Snapshot`]. Configurations are values: applying a move
//! yields a new configuration and never mutates the old one.
//!
//! Moves that break a safety property (occupancy over two, separated buddies,
//! a robot on the object) are still applied; the breach is reported alongside
//! the new configuration so schedulers can record it and keep going.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{dist, Label, Point};

/// Engine-internal robot index. Robots `2k` and `2k + 1` form pair `k`.
pub type RobotId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("robot count {0} is odd; robots always come in pairs")]
    OddRobotCount(usize),
    #[error("robot {0} does not exist")]
    UnknownRobot(RobotId),
    #[error("pair {0} does not exist")]
    UnknownPair(usize),
    #[error("head pair {head} is out of range for {pairs} pairs")]
    HeadPairOutOfRange { head: usize, pairs: usize },
    #[error("pair {pair} is corrupt: buddies are {span} apart (engine bug, not user error)")]
    PairSeparated { pair: usize, span: u64 },
    #[error("snapshot occupancy {count} at label {label} exceeds the multiplicity cap of 2")]
    OccupancyOverCap { label: u8, count: u8 },
    #[error("snapshot must count the observer itself at l0")]
    ObserverMissing,
    #[error("snapshot claims the buddy at label {0} but counts nobody there")]
    BuddyNotVisible(u8),
    #[error("stay intents carry no target and cannot be applied")]
    StayNotApplicable,
}

/// Whether the two robots of a pair share a point or sit on adjacent points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairState {
    Short,
    Long,
}

/// A set of direction labels (`l1..l6`), stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I) -> Self {
        let mut set = LabelSet::EMPTY;
        for l in labels {
            set.insert(l);
        }
        set
    }

    /// Adds a direction label; `l0` is not a direction and is ignored.
    pub fn insert(&mut self, l: Label) {
        if !l.is_here() {
            self.0 |= 1 << l.value();
        }
    }

    pub fn contains(self, l: Label) -> bool {
        !l.is_here() && self.0 & (1 << l.value()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Label> {
        Label::DIRECTIONS.into_iter().filter(move |l| self.contains(*l))
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|l| l.value())).finish()
    }
}

/// What a robot sees during Look: occupancy of its own point and the six
/// neighbors (clamped at two — weak multiplicity detection), where its buddy
/// stands, which neighbors are object points, and whether its pair carries
/// the head flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Snapshot {
    occupy: [u8; 7],
    buddy: Label,
    object_labels: LabelSet,
    is_head: bool,
}

impl Snapshot {
    pub fn new(
        occupy: [u8; 7],
        buddy: Label,
        object_labels: LabelSet,
        is_head: bool,
    ) -> Result<Self, ModelError> {
        for (i, &count) in occupy.iter().enumerate() {
            if count > 2 {
                return Err(ModelError::OccupancyOverCap {
                    label: i as u8,
                    count,
                });
            }
        }
        if occupy[0] == 0 {
            return Err(ModelError::ObserverMissing);
        }
        let buddy_slot = occupy[buddy.value() as usize];
        // A colocated buddy means two robots on the observer's own point; an
        // adjacent buddy means at least one robot on that neighbor.
        if (buddy.is_here() && buddy_slot < 2) || buddy_slot == 0 {
            return Err(ModelError::BuddyNotVisible(buddy.value()));
        }
        Ok(Snapshot {
            occupy,
            buddy,
            object_labels,
            is_head,
        })
    }

    /// Occupancy at label `l`, already clamped at two.
    pub fn occupy(&self, l: Label) -> u8 {
        self.occupy[l.value() as usize]
    }

    /// `l0` when the buddy shares the observer's point, otherwise the
    /// direction the buddy stands in.
    pub fn buddy(&self) -> Label {
        self.buddy
    }

    /// Directions whose neighbor point belongs to the object.
    pub fn object_labels(&self) -> LabelSet {
        self.object_labels
    }

    pub fn is_head(&self) -> bool {
        self.is_head
    }

    pub fn pair_state(&self) -> PairState {
        if self.buddy.is_here() {
            PairState::Short
        } else {
            PairState::Long
        }
    }
}

/// How a move came about. Exclusive moves leave the buddy behind (Short to
/// Long); close-up moves step onto the buddy's point (Long to Short) or past
/// it when the buddy moves away in the same activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    ExclusiveFromShort,
    CloseUpFromLong,
    Stay,
}

/// One robot's planned action for the Move phase of an activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveIntent {
    pub mover: RobotId,
    /// Direction to step in; `l0` if and only if the intent is a stay.
    pub target: Label,
    pub kind: MoveKind,
}

impl MoveIntent {
    pub fn stay(mover: RobotId) -> Self {
        MoveIntent {
            mover,
            target: Label::L0,
            kind: MoveKind::Stay,
        }
    }

    pub fn exclusive(mover: RobotId, target: Label) -> Self {
        MoveIntent {
            mover,
            target,
            kind: MoveKind::ExclusiveFromShort,
        }
    }

    pub fn close_up(mover: RobotId, target: Label) -> Self {
        MoveIntent {
            mover,
            target,
            kind: MoveKind::CloseUpFromLong,
        }
    }

    pub fn is_stay(&self) -> bool {
        self.kind == MoveKind::Stay
    }
}

/// A safety breach observed in a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Violation {
    /// More than two robots on one point.
    Overcrowded { point: Point, count: usize },
    /// The two robots of a pair are neither colocated nor adjacent.
    PairSeparated { pair: usize, span: u64 },
    /// A robot stands on an object point.
    OnObject { robot: RobotId, point: Point },
}

/// Positions of all robots plus the static object. Immutable: moves produce
/// new configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    positions: Vec<Point>,
    object: BTreeSet<Point>,
    head_pair: Option<usize>,
}

impl Configuration {
    /// Builds a configuration. Only structural properties are enforced here
    /// (even robot count, head index in range); safety properties are
    /// observed through [`Configuration::safety_violations`] instead, because
    /// mid-run configurations may legitimately violate them.
    pub fn new(
        positions: Vec<Point>,
        object: BTreeSet<Point>,
        head_pair: Option<usize>,
    ) -> Result<Self, ModelError> {
        if positions.len() % 2 != 0 {
            return Err(ModelError::OddRobotCount(positions.len()));
        }
        let pairs = positions.len() / 2;
        if let Some(head) = head_pair {
            if head >= pairs {
                return Err(ModelError::HeadPairOutOfRange { head, pairs });
            }
        }
        Ok(Configuration {
            positions,
            object,
            head_pair,
        })
    }

    pub fn n_robots(&self) -> usize {
        self.positions.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.positions.len() / 2
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, robot: RobotId) -> Result<Point, ModelError> {
        self.positions
            .get(robot)
            .copied()
            .ok_or(ModelError::UnknownRobot(robot))
    }

    pub fn object(&self) -> &BTreeSet<Point> {
        &self.object
    }

    pub fn head_pair(&self) -> Option<usize> {
        self.head_pair
    }

    pub fn pair_of(robot: RobotId) -> usize {
        robot / 2
    }

    pub fn buddy_of(robot: RobotId) -> RobotId {
        robot ^ 1
    }

    pub fn pair_points(&self, pair: usize) -> Result<(Point, Point), ModelError> {
        if pair >= self.n_pairs() {
            return Err(ModelError::UnknownPair(pair));
        }
        Ok((self.positions[2 * pair], self.positions[2 * pair + 1]))
    }

    /// Short, Long, or an error when the buddies drifted apart — the latter
    /// signals an engine bug, since no legal move separates a pair.
    pub fn pair_state(&self, pair: usize) -> Result<PairState, ModelError> {
        let (a, b) = self.pair_points(pair)?;
        match dist(a, b) {
            0 => Ok(PairState::Short),
            1 => Ok(PairState::Long),
            span => Err(ModelError::PairSeparated { pair, span }),
        }
    }

    /// Number of robots standing on `p`, unclamped.
    pub fn robots_at(&self, p: Point) -> usize {
        self.positions.iter().filter(|q| **q == p).count()
    }

    fn occupancy(&self) -> BTreeMap<Point, usize> {
        let mut counts = BTreeMap::new();
        for p in &self.positions {
            *counts.entry(*p).or_insert(0) += 1;
        }
        counts
    }

    /// The view `robot` obtains during Look. Fails only when the robot is
    /// unknown or its pair is corrupt (buddy neither here nor adjacent).
    pub fn take_snapshot(&self, robot: RobotId) -> Result<Snapshot, ModelError> {
        let own = self.position(robot)?;
        let buddy_pos = self.position(Configuration::buddy_of(robot))?;
        let buddy = if buddy_pos == own {
            Label::L0
        } else {
            *Label::DIRECTIONS
                .iter()
                .find(|l| own.step(**l) == buddy_pos)
                .ok_or(ModelError::PairSeparated {
                    pair: Configuration::pair_of(robot),
                    span: dist(own, buddy_pos),
                })?
        };
        let mut occupy = [0u8; 7];
        occupy[0] = self.robots_at(own).min(2) as u8;
        let mut object_labels = LabelSet::EMPTY;
        for l in Label::DIRECTIONS {
            let p = own.step(l);
            occupy[l.value() as usize] = self.robots_at(p).min(2) as u8;
            if self.object.contains(&p) {
                object_labels.insert(l);
            }
        }
        let is_head = self.head_pair == Some(Configuration::pair_of(robot));
        Snapshot::new(occupy, buddy, object_labels, is_head)
    }

    /// Applies one move intent, returning the new configuration together with
    /// every safety breach present afterwards. Breaches are reported, not
    /// rejected. Stay intents are not applicable moves.
    pub fn apply_move(&self, m: &MoveIntent) -> Result<(Configuration, Vec<Violation>), ModelError> {
        if m.is_stay() {
            return Err(ModelError::StayNotApplicable);
        }
        self.apply_moves(std::slice::from_ref(m))
    }

    /// Applies a batch of moves as one indivisible event (both robots of a
    /// pair, or every active pair of a synchronous round), then reports the
    /// safety state of the result.
    pub fn apply_moves(
        &self,
        moves: &[MoveIntent],
    ) -> Result<(Configuration, Vec<Violation>), ModelError> {
        let mut positions = self.positions.clone();
        for m in moves {
            if m.is_stay() {
                continue;
            }
            let own = self.position(m.mover)?;
            positions[m.mover] = own.step(m.target);
        }
        let next = Configuration {
            positions,
            object: self.object.clone(),
            head_pair: self.head_pair,
        };
        let violations = next.safety_violations();
        Ok((next, violations))
    }

    /// Every safety breach in this configuration, in deterministic order:
    /// overcrowded points by coordinate, separated pairs by index, robots on
    /// object points by index.
    pub fn safety_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (point, count) in self.occupancy() {
            if count > 2 {
                out.push(Violation::Overcrowded { point, count });
            }
        }
        for pair in 0..self.n_pairs() {
            let (a, b) = self.pair_points(pair).expect("pair index in range");
            let span = dist(a, b);
            if span > 1 {
                out.push(Violation::PairSeparated { pair, span });
            }
        }
        for (robot, p) in self.positions.iter().enumerate() {
            if self.object.contains(p) {
                out.push(Violation::OnObject {
                    robot,
                    point: *p,
                });
            }
        }
        out
    }

    /// Whether the robots form a line: all occupied points share one `y`, the
    /// occupied `x` range has no gap, no point hosts more than two robots,
    /// and no two distinct Long pairs lie on the same two points.
    pub fn is_line_formed(&self) -> bool {
        if self.positions.is_empty() {
            return true;
        }
        let y = self.positions[0].y;
        if self.positions.iter().any(|p| p.y != y) {
            return false;
        }
        let occupancy = self.occupancy();
        if occupancy.values().any(|c| *c > 2) {
            return false;
        }
        let min_x = self.positions.iter().map(|p| p.x).min().unwrap();
        let max_x = self.positions.iter().map(|p| p.x).max().unwrap();
        for x in min_x..=max_x {
            if !occupancy.contains_key(&Point::new(x, y)) {
                return false;
            }
        }
        let mut long_spans = BTreeSet::new();
        for pair in 0..self.n_pairs() {
            let (a, b) = self.pair_points(pair).expect("pair index in range");
            if a != b {
                let span = (a.min(b), a.max(b));
                if !long_spans.insert(span) {
                    return false;
                }
            }
        }
        true
    }

    /// FNV-1a hash of the robot positions, as fixed-width hex. Traces store
    /// this digest per event so replays can verify they reproduce the run.
    pub fn digest(&self) -> String {
        const OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET_BASIS;
        let eat = |h: &mut u64, v: i64| {
            for b in v.to_le_bytes() {
                *h ^= u64::from(b);
                *h = h.wrapping_mul(PRIME);
            }
        };
        eat(&mut h, self.positions.len() as i64);
        for p in &self.positions {
            eat(&mut h, p.x);
            eat(&mut h, p.y);
        }
        format!("{h:016x}")
    }

    /// The same configuration shifted by `(dx, dy)`: robots and object alike.
    pub fn translated(&self, dx: i64, dy: i64) -> Configuration {
        Configuration {
            positions: self.positions.iter().map(|p| p.translate(dx, dy)).collect(),
            object: self.object.iter().map(|p| p.translate(dx, dy)).collect(),
            head_pair: self.head_pair,
        }
    }
}
