//! Points, direction labels, and distance on the triangular grid.
//!
//! The grid is the integer lattice `Z x Z` where every point has exactly six
//! neighbors: east, south-east, south-west, west, north-west, and north-east.
//! A robot standing on a point names its own point `l0` and the six
//! surrounding points `l1..l6` in clockwise order starting from east. All
//! robots share this orientation, so label arithmetic is global.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("label value {0} is out of range (expected 0..=6)")]
    InvalidLabel(u8),
    #[error("label l0 names the observer's own point, not a direction")]
    NotADirection,
}

/// A point of the triangular grid, in axial coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn translate(self, dx: i64, dy: i64) -> Self {
        Point::new(self.x + dx, self.y + dy)
    }

    /// The neighbor reached by stepping one point in direction `l`.
    ///
    /// Panics if `l` is `l0`; callers hold a direction label by construction.
    pub fn step(self, l: Label) -> Self {
        let (dx, dy) = label_offset(l).expect("step requires a direction label");
        self.translate(dx, dy)
    }
}

impl From<[i64; 2]> for Point {
    fn from(v: [i64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [i64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// A local label: `l0` is the observer's own point, `l1..l6` the six
/// neighbors in clockwise order starting from east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Label(u8);

impl Label {
    pub const L0: Label = Label(0);
    pub const L1: Label = Label(1);
    pub const L2: Label = Label(2);
    pub const L3: Label = Label(3);
    pub const L4: Label = Label(4);
    pub const L5: Label = Label(5);
    pub const L6: Label = Label(6);

    /// The six direction labels in ascending order.
    pub const DIRECTIONS: [Label; 6] = [
        Label(1),
        Label(2),
        Label(3),
        Label(4),
        Label(5),
        Label(6),
    ];

    pub fn new(value: u8) -> Result<Self, GeometryError> {
        if value <= 6 {
            Ok(Label(value))
        } else {
            Err(GeometryError::InvalidLabel(value))
        }
    }

    /// A direction label (`l1..l6`); rejects `0`.
    pub fn direction(value: u8) -> Result<Self, GeometryError> {
        match value {
            0 => Err(GeometryError::NotADirection),
            1..=6 => Ok(Label(value)),
            _ => Err(GeometryError::InvalidLabel(value)),
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_here(self) -> bool {
        self.0 == 0
    }

    /// The direction pointing the opposite way; panics on `l0`.
    pub fn opposite(self) -> Label {
        next(self, 3).expect("opposite requires a direction label")
    }
}

impl TryFrom<u8> for Label {
    type Error = GeometryError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Label::new(value)
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> Self {
        l.0
    }
}

/// Offsets of the six directions, indexed by label value minus one.
/// `l1` = east, then clockwise: `l2` south-east, `l3` south-west, `l4` west,
/// `l5` north-west, `l6` north-east.
const OFFSETS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

/// The coordinate offset of one step in direction `l`; rejects `l0`.
pub fn label_offset(l: Label) -> Result<(i64, i64), GeometryError> {
    if l.is_here() {
        Err(GeometryError::NotADirection)
    } else {
        Ok(OFFSETS[(l.0 - 1) as usize])
    }
}

/// The direction label `s` sixths of a clockwise turn away from `l`.
/// Negative `s` turns counter-clockwise; rejects `l0`.
pub fn next(l: Label, s: i64) -> Result<Label, GeometryError> {
    if l.is_here() {
        return Err(GeometryError::NotADirection);
    }
    let shifted = (i64::from(l.0) - 1 + s).rem_euclid(6) + 1;
    Ok(Label(shifted as u8))
}

/// Grid distance between two points.
///
/// Moving diagonally (one step that changes both coordinates) is a single
/// hop when the coordinate deltas have opposite signs, which is what the
/// subtraction accounts for.
pub fn dist(u: Point, v: Point) -> u64 {
    let dx = u.x - v.x;
    let dy = u.y - v.y;
    let (ax, ay) = (dx.unsigned_abs(), dy.unsigned_abs());
    if dx.signum() * dy.signum() >= 0 {
        ax + ay
    } else {
        ax + ay - ax.min(ay)
    }
}

/// The six neighbors of `p`, ordered by direction label `l1..l6`.
pub fn neighbors(p: Point) -> [Point; 6] {
    let mut out = [p; 6];
    for (i, (dx, dy)) in OFFSETS.iter().enumerate() {
        out[i] = p.translate(*dx, *dy);
    }
    out
}
