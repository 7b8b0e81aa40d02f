//! Static coating analysis and post-run checkers.
//!
//! The central question for coating: which points on the object's surface can
//! a pair actually reach and settle on? A surface point is only dependable
//! when the robots have two routes to it that share no free grid point, so
//! that no single occupied or blocked vertex can strand the walk. We answer
//! this with a max-flow computation on a vertex-split grid graph and call a
//! surface point *coatable* when the flow reaches 2. The non-coating set is
//! the rest of the surface: pockets behind one-point-wide mouths, and cavities
//! with no access at all.
//!
//! The grid is infinite, so flows run inside a finite [`Window`] around the
//! object and the robots. Any margin wide enough to let routes swing around
//! the object gives the same answer; the default of 3 is checked against a
//! doubled margin in tests.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use petgraph::algo::ford_fulkerson;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::engine::{replay, ReplayError, Trace};
use crate::geometry::{neighbors, Point};
use crate::model::{Configuration, PairState};

/// Capacity used for every "unbounded" edge. Anything above 2 works: the
/// analysis only distinguishes flow < 2 from flow >= 2.
const ROUTE_CAP: u32 = 4;

/// Finite axes-aligned box of grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub min_x: i64,
    pub min_y: i64,
    pub max_x: i64,
    pub max_y: i64,
}

impl Window {
    /// Smallest window containing every given point, padded by `margin` on
    /// all sides. `None` when there are no points at all.
    pub fn around<I: IntoIterator<Item = Point>>(points: I, margin: i64) -> Option<Window> {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut w = Window {
            min_x: first.x,
            min_y: first.y,
            max_x: first.x,
            max_y: first.y,
        };
        for p in iter {
            w.min_x = w.min_x.min(p.x);
            w.min_y = w.min_y.min(p.y);
            w.max_x = w.max_x.max(p.x);
            w.max_y = w.max_y.max(p.y);
        }
        w.min_x -= margin;
        w.min_y -= margin;
        w.max_x += margin;
        w.max_y += margin;
        Some(w)
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.min_x..=self.max_x).contains(&p.x) && (self.min_y..=self.max_y).contains(&p.y)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (self.min_x..=self.max_x)
            .flat_map(move |x| (self.min_y..=self.max_y).map(move |y| Point::new(x, y)))
    }
}

/// Window around everything in the configuration — object and robots.
pub fn window_for(c: &Configuration, margin: i64) -> Option<Window> {
    Window::around(
        c.object().iter().copied().chain(c.positions().iter().copied()),
        margin,
    )
}

/// Free points adjacent to at least one object point. Robot-occupied points
/// count: occupation does not stop a point from being part of the surface.
pub fn surface_set(c: &Configuration) -> BTreeSet<Point> {
    let object = c.object();
    let mut surface = BTreeSet::new();
    for &o in object {
        for n in neighbors(o) {
            if !object.contains(&n) {
                surface.insert(n);
            }
        }
    }
    surface
}

/// Where routes are allowed to begin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceMode {
    /// Routes start at any robot point and may share one — a point holding a
    /// full pair can send both members. This is the default notion.
    #[default]
    AnyRobot,
    /// Each robot point originates at most one route.
    DistinctRobots,
    /// Both routes must leave from a single robot point (the best one);
    /// other robot points are traversable like any free point.
    SingleRobot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub margin: i64,
    pub source_mode: SourceMode,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            margin: 3,
            source_mode: SourceMode::AnyRobot,
        }
    }
}

/// Number of routes from the robots to `p` that pairwise share no free grid
/// point other than robot positions and `p` itself, clamped at 4. A point
/// occupied by a robot always reports 4. Returns 0 when `p` is an object
/// point, unreachable, or outside the window.
pub fn disjoint_route_count(c: &Configuration, p: Point, opts: &AnalysisOptions) -> u32 {
    if c.object().contains(&p) || c.n_robots() == 0 {
        return 0;
    }
    let Some(window) = window_for(c, opts.margin) else {
        return 0;
    };
    if !window.contains(p) {
        return 0;
    }
    let robot_points: BTreeSet<Point> = c.positions().iter().copied().collect();
    match opts.source_mode {
        SourceMode::AnyRobot => {
            let sources: BTreeMap<Point, u32> =
                robot_points.iter().map(|&r| (r, ROUTE_CAP)).collect();
            route_flow(c, p, &window, &sources)
        }
        SourceMode::DistinctRobots => {
            let sources: BTreeMap<Point, u32> = robot_points.iter().map(|&r| (r, 1)).collect();
            route_flow(c, p, &window, &sources)
        }
        SourceMode::SingleRobot => robot_points
            .iter()
            .map(|&r| {
                let sources: BTreeMap<Point, u32> = [(r, ROUTE_CAP)].into();
                route_flow(c, p, &window, &sources)
            })
            .max()
            .unwrap_or(0),
    }
}

/// Max flow from the source points to `p` in the vertex-split window graph:
/// every free point becomes an in/out node pair whose connecting edge caps
/// how many routes may pass through it (1 for ordinary free points), and
/// adjacency edges are effectively unbounded.
fn route_flow(c: &Configuration, p: Point, window: &Window, sources: &BTreeMap<Point, u32>) -> u32 {
    let object = c.object();
    let mut g: DiGraph<(), u32> = DiGraph::new();
    let mut split: BTreeMap<Point, (NodeIndex, NodeIndex)> = BTreeMap::new();
    for q in window.points() {
        if object.contains(&q) {
            continue;
        }
        let enter = g.add_node(());
        let exit = g.add_node(());
        let cap = if q == p {
            ROUTE_CAP
        } else {
            sources.get(&q).copied().unwrap_or(1)
        };
        g.add_edge(enter, exit, cap);
        split.insert(q, (enter, exit));
    }
    // The sink is p's entry node: routes may meet at p but nowhere before it.
    let Some(&(sink, _)) = split.get(&p) else {
        return 0;
    };
    for (&q, &(_, exit)) in &split {
        for n in neighbors(q) {
            if let Some(&(n_enter, _)) = split.get(&n) {
                g.add_edge(exit, n_enter, ROUTE_CAP);
            }
        }
    }
    let source = g.add_node(());
    let mut reachable_source = false;
    for r in sources.keys() {
        if let Some(&(r_enter, _)) = split.get(r) {
            g.add_edge(source, r_enter, ROUTE_CAP);
            reachable_source = true;
        }
    }
    if !reachable_source {
        return 0;
    }
    let (flow, _) = ford_fulkerson(&g, source, sink);
    flow
}

/// Surface points with fewer than two independent routes from the robots.
pub fn non_coating_set(c: &Configuration, opts: &AnalysisOptions) -> BTreeSet<Point> {
    surface_set(c)
        .into_iter()
        .filter(|&p| disjoint_route_count(c, p, opts) < 2)
        .collect()
}

/// Surface points the robots can dependably coat.
pub fn coating_set(c: &Configuration, opts: &AnalysisOptions) -> BTreeSet<Point> {
    let non_coating = non_coating_set(c, opts);
    surface_set(c)
        .into_iter()
        .filter(|p| !non_coating.contains(p))
        .collect()
}

/// Outcome of judging a finished coating run against the coating set of the
/// *initial* configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoatingCheck {
    pub coating_set: BTreeSet<Point>,
    /// Coating points with no robot on them at the end.
    pub uncovered: BTreeSet<Point>,
    /// Pairs that did not finish contracted (Short).
    pub long_pairs: Vec<usize>,
    /// Pairs available vs. coating points to fill.
    pub pairs: usize,
    pub required: usize,
    pub terminated: bool,
    pub solved: bool,
}

/// A coating run is solved when every coatable surface point ends up
/// occupied, every pair ends Short, and the run terminated on its own.
pub fn check_coating_solved(
    initial: &Configuration,
    final_config: &Configuration,
    terminated: bool,
    opts: &AnalysisOptions,
) -> CoatingCheck {
    let coating = coating_set(initial, opts);
    let uncovered: BTreeSet<Point> = coating
        .iter()
        .copied()
        .filter(|&p| final_config.robots_at(p) == 0)
        .collect();
    let long_pairs: Vec<usize> = (0..final_config.n_pairs())
        .filter(|&pair| !matches!(final_config.pair_state(pair), Ok(PairState::Short)))
        .collect();
    let solved = uncovered.is_empty() && long_pairs.is_empty() && terminated;
    CoatingCheck {
        uncovered,
        long_pairs,
        pairs: final_config.n_pairs(),
        required: coating.len(),
        coating_set: coating,
        terminated,
        solved,
    }
}

/// What a marching trace did: whether the line survived every frame and how
/// far and when the front moved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarchingProgress {
    /// Frames examined, counting the initial configuration.
    pub frames: usize,
    pub line_formed_always: bool,
    /// First frame (0 = initial) that is not line-formed.
    pub first_break: Option<usize>,
    /// Frames at which the front — the largest robot x — advanced.
    pub head_advances: Vec<usize>,
    /// Net front movement over the whole trace.
    pub total_advance: i64,
}

/// Replays `trace` and reports line preservation and front progress.
pub fn check_marching_progress(trace: &Trace) -> Result<MarchingProgress, ReplayError> {
    let replayed = replay(trace)?;
    let front = |c: &Configuration| c.positions().iter().map(|p| p.x).max();

    let mut first_break = None;
    let mut head_advances = Vec::new();
    let mut previous = front(&replayed.initial);
    let initial_front = previous;
    for frame in 0..replayed.frames() {
        let c = replayed.frame(frame).expect("frame index in range");
        if first_break.is_none() && !c.is_line_formed() {
            first_break = Some(frame);
        }
        if frame > 0 {
            let now = front(c);
            if now > previous {
                head_advances.push(frame);
            }
            previous = now;
        }
    }
    let total_advance = match (initial_front, front(replayed.last())) {
        (Some(a), Some(b)) => b - a,
        _ => 0,
    };
    Ok(MarchingProgress {
        frames: replayed.frames(),
        line_formed_always: first_break.is_none(),
        first_break,
        head_advances,
        total_advance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Algorithm;
    use crate::engine::{run, RunConfig, SchedulerKind};
    use crate::scene::Scene;

    fn config(json: &str) -> Configuration {
        Scene::from_json_str(json).unwrap().to_configuration().unwrap()
    }

    #[test]
    fn surface_of_a_single_cell_is_its_six_neighbors() {
        let c = config(r#"{"pairs":[{"a":[3,0],"b":[3,0]}],"object":[[0,0]]}"#);
        let expected: BTreeSet<Point> = neighbors(Point::new(0, 0)).into_iter().collect();
        assert_eq!(surface_set(&c), expected);
        assert_eq!(expected.len(), 6);
    }

    #[test]
    fn surface_of_a_two_cell_object_has_eight_points() {
        let c = config(r#"{"pairs":[{"a":[4,0],"b":[4,0]}],"object":[[0,0],[1,0]]}"#);
        let expected: BTreeSet<Point> = [
            (1, -1),
            (0, -1),
            (-1, 0),
            (-1, 1),
            (0, 1),
            (2, 0),
            (2, -1),
            (1, 1),
        ]
        .into_iter()
        .map(|(x, y)| Point::new(x, y))
        .collect();
        assert_eq!(surface_set(&c), expected);
    }

    #[test]
    fn open_surface_is_fully_coatable() {
        let c = config(r#"{"pairs":[{"a":[2,0],"b":[2,0]}],"object":[[0,0]]}"#);
        let opts = AnalysisOptions::default();
        assert!(non_coating_set(&c, &opts).is_empty());
        assert_eq!(coating_set(&c, &opts), surface_set(&c));
    }

    #[test]
    fn a_sealed_cavity_is_non_coating() {
        // The six neighbors of the origin are object; the origin itself is a
        // free hole no route can enter.
        let c = config(
            r#"{"pairs":[{"a":[3,0],"b":[3,0]}],
                "object":[[1,0],[1,-1],[0,-1],[-1,0],[-1,1],[0,1]]}"#,
        );
        let opts = AnalysisOptions::default();
        let hole = Point::new(0, 0);
        assert!(surface_set(&c).contains(&hole));
        assert_eq!(disjoint_route_count(&c, hole, &opts), 0);
        assert_eq!(
            non_coating_set(&c, &opts),
            BTreeSet::from([hole]),
            "only the sealed hole should be non-coating"
        );
    }

    #[test]
    fn a_pocket_behind_a_one_point_mouth_is_non_coating() {
        // Same ring with one object point removed: the origin is reachable,
        // but only through the single mouth point (1,0).
        let c = config(
            r#"{"pairs":[{"a":[3,0],"b":[3,0]}],
                "object":[[1,-1],[0,-1],[-1,0],[-1,1],[0,1]]}"#,
        );
        let opts = AnalysisOptions::default();
        let pocket = Point::new(0, 0);
        assert_eq!(disjoint_route_count(&c, pocket, &opts), 1);
        assert_eq!(non_coating_set(&c, &opts), BTreeSet::from([pocket]));
        // The mouth itself has routes around either side of the ring.
        assert!(disjoint_route_count(&c, Point::new(1, 0), &opts) >= 2);
    }

    #[test]
    fn widening_the_margin_does_not_change_the_answer() {
        let c = config(
            r#"{"pairs":[{"a":[3,0],"b":[3,0]}],
                "object":[[1,-1],[0,-1],[-1,0],[-1,1],[0,1]]}"#,
        );
        let narrow = AnalysisOptions {
            margin: 3,
            ..AnalysisOptions::default()
        };
        let wide = AnalysisOptions {
            margin: 6,
            ..AnalysisOptions::default()
        };
        assert_eq!(non_coating_set(&c, &narrow), non_coating_set(&c, &wide));
    }

    #[test]
    fn occupied_surface_points_are_always_coatable() {
        let c = config(r#"{"pairs":[{"a":[1,0],"b":[1,0]}],"object":[[0,0]]}"#);
        for mode in [
            SourceMode::AnyRobot,
            SourceMode::DistinctRobots,
            SourceMode::SingleRobot,
        ] {
            let opts = AnalysisOptions {
                source_mode: mode,
                ..AnalysisOptions::default()
            };
            assert_eq!(
                disjoint_route_count(&c, Point::new(1, 0), &opts),
                ROUTE_CAP,
                "mode {mode:?}"
            );
        }
    }

    #[test]
    fn distinct_robots_mode_needs_two_robot_points() {
        let opts = AnalysisOptions {
            source_mode: SourceMode::DistinctRobots,
            ..AnalysisOptions::default()
        };
        // One Short pair occupies a single point, so at most one route may
        // start there, and every unoccupied surface point is non-coating.
        let single = config(r#"{"pairs":[{"a":[2,0],"b":[2,0]}],"object":[[0,0]]}"#);
        let occupied = Point::new(2, 0);
        assert!(non_coating_set(&single, &opts)
            .iter()
            .all(|&p| p != occupied));
        assert_eq!(
            non_coating_set(&single, &opts).len(),
            surface_set(&single).len(),
            "no surface point is occupied here, so all are non-coating"
        );
        // A Long pair stands on two points and unlocks the surface again.
        let double = config(r#"{"pairs":[{"a":[2,0],"b":[3,0]}],"object":[[0,0]]}"#);
        assert!(non_coating_set(&double, &opts).is_empty());
    }

    #[test]
    fn single_robot_mode_matches_any_robot_for_one_robot_point() {
        let c = config(r#"{"pairs":[{"a":[2,0],"b":[2,0]}],"object":[[0,0]]}"#);
        let any = AnalysisOptions::default();
        let single = AnalysisOptions {
            source_mode: SourceMode::SingleRobot,
            ..AnalysisOptions::default()
        };
        for p in surface_set(&c) {
            assert_eq!(
                disjoint_route_count(&c, p, &any),
                disjoint_route_count(&c, p, &single)
            );
        }
    }

    #[test]
    fn coating_check_accepts_a_fully_coated_ring() {
        // Six Short pairs already sit on the six coating points.
        let c = config(
            r#"{"pairs":[
                {"a":[1,0],"b":[1,0]},{"a":[1,-1],"b":[1,-1]},{"a":[0,-1],"b":[0,-1]},
                {"a":[-1,0],"b":[-1,0]},{"a":[-1,1],"b":[-1,1]},{"a":[0,1],"b":[0,1]}],
                "object":[[0,0]]}"#,
        );
        let check = check_coating_solved(&c, &c, true, &AnalysisOptions::default());
        assert_eq!(check.required, 6);
        assert!(check.uncovered.is_empty());
        assert!(check.long_pairs.is_empty());
        assert!(check.solved);
    }

    #[test]
    fn coating_check_rejects_gaps_and_long_pairs() {
        let initial = config(
            r#"{"pairs":[
                {"a":[1,0],"b":[1,0]},{"a":[1,-1],"b":[1,-1]},{"a":[0,-1],"b":[0,-1]},
                {"a":[-1,0],"b":[-1,0]},{"a":[-1,1],"b":[-1,1]},{"a":[0,1],"b":[0,1]}],
                "object":[[0,0]]}"#,
        );
        // Same robots, but the first pair stretched off its point to (2,0).
        let stretched = config(
            r#"{"pairs":[
                {"a":[2,0],"b":[2,-1]},{"a":[1,-1],"b":[1,-1]},{"a":[0,-1],"b":[0,-1]},
                {"a":[-1,0],"b":[-1,0]},{"a":[-1,1],"b":[-1,1]},{"a":[0,1],"b":[0,1]}],
                "object":[[0,0]]}"#,
        );
        let check =
            check_coating_solved(&initial, &stretched, true, &AnalysisOptions::default());
        assert_eq!(check.uncovered, BTreeSet::from([Point::new(1, 0)]));
        assert_eq!(check.long_pairs, vec![0]);
        assert!(!check.solved);
    }

    #[test]
    fn marching_progress_on_a_synchronous_run() {
        let scene = Scene::from_json_str(
            r#"{"pairs":[{"a":[0,0],"b":[0,0]},{"a":[1,0],"b":[2,0]}]}"#,
        )
        .unwrap();
        let outcome = run(
            &scene,
            &RunConfig {
                algorithm: Algorithm::marching(),
                scheduler: SchedulerKind::FSync,
                max_events: 10,
            },
        )
        .unwrap();
        let progress = check_marching_progress(&outcome.trace).unwrap();
        assert_eq!(progress.frames, 11);
        assert!(progress.line_formed_always);
        // The two-pair wave has period three: split, close up, stride.
        assert_eq!(progress.head_advances, vec![3, 6, 9]);
        assert_eq!(progress.total_advance, 3);
    }

    #[test]
    fn marching_progress_flags_a_scene_that_is_not_a_line() {
        let scene = Scene::from_json_str(
            r#"{"pairs":[{"a":[0,0],"b":[0,0]},{"a":[0,1],"b":[0,1]}]}"#,
        )
        .unwrap();
        let outcome = run(
            &scene,
            &RunConfig {
                algorithm: Algorithm::marching(),
                scheduler: SchedulerKind::FSync,
                max_events: 2,
            },
        )
        .unwrap();
        let progress = check_marching_progress(&outcome.trace).unwrap();
        assert!(!progress.line_formed_always);
        assert_eq!(progress.first_break, Some(0));
    }
}
