//! Simulator, model checker, and coating analysis for pairbot systems on the
//! triangular grid.
//!
//! A pairbot is a pair of anonymous robots that are always on the same point
//! (*Short*) or on adjacent points (*Long*). Robots observe only their own
//! point and its six neighbors, with occupancy counts clamped at two, and act
//! by moving onto their buddy's point or — from Short — one point away from
//! it. This crate provides:
//!
//! * [`geometry`] — grid points, direction labels, label arithmetic, distance;
//! * [`model`] — configurations, local snapshots, move intents, safety checks;
//! * [`scene`] — the JSON scene format and its validating loader;
//! * [`algorithms`] — the marching and object-coating guarded-rule programs;
//! * [`engine`] — synchronous and asynchronous schedulers, traces, replay,
//!   and an exhaustive interleaving explorer;
//! * [`analysis`] — surface/coating point-set computations and end-state
//!   checkers;
//! * [`render`] — ASCII and SVG views of configurations.

pub mod algorithms;
pub mod analysis;
pub mod engine;
pub mod geometry;
pub mod model;
pub mod render;
pub mod scene;

pub use algorithms::{Algorithm, ScanOrder};
pub use engine::{explore, run, ExploreConfig, RunConfig, SchedulerKind};
pub use geometry::{dist, neighbors, Label, Point};
pub use model::{Configuration, MoveIntent, Snapshot, Violation};
pub use scene::Scene;
