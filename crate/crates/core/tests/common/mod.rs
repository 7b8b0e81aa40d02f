//! Oracles shared by the integration tests.
//!
//! Everything here recomputes answers from first principles — breadth-first
//! search, exhaustive removal, literal path enumeration — so the library can
//! be checked against code that shares none of its shortcuts.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::path::PathBuf;

use pairbot_core::analysis::{surface_set, window_for, Window};
use pairbot_core::geometry::{neighbors, Point};
use pairbot_core::model::Configuration;
use pairbot_core::scene::Scene;

pub fn pt(x: i64, y: i64) -> Point {
    Point::new(x, y)
}

pub fn scenes_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

pub fn load_scene(name: &str) -> Scene {
    let path = scenes_dir().join(name);
    Scene::from_path(&path).unwrap_or_else(|e| panic!("loading {}: {e}", path.display()))
}

/// Grid distance recomputed by breadth-first search over the six-neighbor
/// graph, restricted to the bounding box of the endpoints plus a pad. A
/// geodesic never needs to leave that box: one can always move diagonally
/// toward the goal first and straight after.
pub fn bfs_dist(a: Point, b: Point) -> u64 {
    let min_x = a.x.min(b.x) - 1;
    let max_x = a.x.max(b.x) + 1;
    let min_y = a.y.min(b.y) - 1;
    let max_y = a.y.max(b.y) + 1;
    let mut seen: HashMap<Point, u64> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(a, 0);
    queue.push_back(a);
    while let Some(p) = queue.pop_front() {
        let d = seen[&p];
        if p == b {
            return d;
        }
        for n in neighbors(p) {
            if n.x < min_x || n.x > max_x || n.y < min_y || n.y > max_y {
                continue;
            }
            seen.entry(n).or_insert_with(|| {
                queue.push_back(n);
                d + 1
            });
        }
    }
    panic!("no path from {a:?} to {b:?} within the padded box");
}

fn robot_points(c: &Configuration) -> BTreeSet<Point> {
    c.positions().iter().copied().collect()
}

/// Points reachable from the robots through non-object window points,
/// optionally with one point removed from the graph.
fn reachable(
    c: &Configuration,
    window: &Window,
    removed: Option<Point>,
) -> HashSet<Point> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    for &r in &robot_points(c) {
        if Some(r) != removed && seen.insert(r) {
            queue.push_back(r);
        }
    }
    while let Some(p) = queue.pop_front() {
        for n in neighbors(p) {
            if !window.contains(n) || c.object().contains(&n) || Some(n) == removed {
                continue;
            }
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// The set of surface points that cannot receive two separated routes,
/// recomputed by exhaustive single-removal: a surface point is hopeless when
/// it is unreachable outright, or when deleting some single free point that
/// holds no robot (and is not the point itself) cuts it off from every robot.
pub fn cut_non_coating(c: &Configuration, margin: i64) -> BTreeSet<Point> {
    let window = window_for(c, margin).expect("non-empty scene");
    let robots = robot_points(c);
    let surface = surface_set(c);
    if robots.is_empty() {
        return surface;
    }

    let base = reachable(c, &window, None);
    let mut non: BTreeSet<Point> = surface
        .iter()
        .copied()
        .filter(|s| !base.contains(s))
        .collect();

    for v in window.points() {
        if c.object().contains(&v) || robots.contains(&v) {
            continue;
        }
        let cut = reachable(c, &window, Some(v));
        for &s in &surface {
            if s != v && base.contains(&s) && !cut.contains(&s) {
                non.insert(s);
            }
        }
    }
    non
}

/// Literal route-pair check for very small windows: enumerates simple paths
/// from robot points to `target` through the window and reports whether two
/// of them share no exclusive point. Exclusive points are the free interior
/// ones — robot points and the target itself are shareable, and a path made
/// of nothing but shareable points carries a whole pair on its own. Stops as
/// soon as a disjoint pair turns up; panics if a hopeless shape makes the
/// enumeration explode, so keep the shapes tiny.
pub fn route_pair_exists(c: &Configuration, target: Point, margin: i64) -> bool {
    let window = window_for(c, margin).expect("non-empty scene");
    let robots = robot_points(c);
    let mut paths: Vec<BTreeSet<Point>> = Vec::new();
    let mut found = false;

    fn walk(
        p: Point,
        target: Point,
        c: &Configuration,
        window: &Window,
        robots: &BTreeSet<Point>,
        on_path: &mut BTreeSet<Point>,
        interior: &mut BTreeSet<Point>,
        out: &mut Vec<BTreeSet<Point>>,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        if p == target {
            if interior.is_empty() || out.iter().any(|seen| seen.is_disjoint(interior)) {
                *found = true;
            } else {
                out.push(interior.clone());
                if out.len() > 20_000 {
                    panic!("path enumeration too large; use a smaller shape");
                }
            }
            return;
        }
        for n in neighbors(p) {
            if !window.contains(n) || c.object().contains(&n) || on_path.contains(&n) {
                continue;
            }
            let exclusive = n != target && !robots.contains(&n);
            on_path.insert(n);
            if exclusive {
                interior.insert(n);
            }
            walk(n, target, c, window, robots, on_path, interior, out, found);
            if exclusive {
                interior.remove(&n);
            }
            on_path.remove(&n);
        }
    }

    for &r in &robots {
        let mut on_path = BTreeSet::from([r]);
        let mut interior = BTreeSet::new();
        walk(
            r,
            target,
            c,
            &window,
            &robots,
            &mut on_path,
            &mut interior,
            &mut paths,
            &mut found,
        );
        if found {
            return true;
        }
    }
    false
}

/// All connected object shapes of each size up to `max_size`, distinct up to
/// translation, each normalized so the smallest x and smallest y are zero.
/// Grown cell by cell from the single-point shape.
pub fn polyhexes_up_to(max_size: usize) -> Vec<Vec<BTreeSet<Point>>> {
    let canon = |cells: &BTreeSet<Point>| -> BTreeSet<Point> {
        let min_x = cells.iter().map(|p| p.x).min().unwrap();
        let min_y = cells.iter().map(|p| p.y).min().unwrap();
        cells
            .iter()
            .map(|p| pt(p.x - min_x, p.y - min_y))
            .collect()
    };

    let mut levels: Vec<Vec<BTreeSet<Point>>> = Vec::new();
    let mut level: HashSet<BTreeSet<Point>> = HashSet::new();
    level.insert(BTreeSet::from([pt(0, 0)]));
    for _ in 0..max_size {
        let mut sorted: Vec<_> = level.iter().cloned().collect();
        sorted.sort();
        levels.push(sorted);
        let mut grown = HashSet::new();
        for shape in &level {
            for &cell in shape {
                for n in neighbors(cell) {
                    if !shape.contains(&n) {
                        let mut bigger = shape.clone();
                        bigger.insert(n);
                        grown.insert(canon(&bigger));
                    }
                }
            }
        }
        level = grown;
    }
    levels
}

/// One element a pair can occupy on the line: contracted on a point, or
/// expanded over a unit span to the east.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LineElem {
    Short(i64),
    Long(i64),
}

impl LineElem {
    fn occupied(self) -> Vec<(i64, usize)> {
        match self {
            LineElem::Short(x) => vec![(x, 2)],
            LineElem::Long(x) => vec![(x, 1), (x + 1, 1)],
        }
    }
}

/// Every distinct line arrangement of `n_pairs` pairs, up to translation:
/// all robots on one row, the occupied stretch gap-free, at most two robots
/// per point, and no two pairs expanded over the same span. Returned as
/// ready-to-run configurations with no object.
pub fn line_arrangements(n_pairs: usize) -> Vec<Configuration> {
    let span = 2 * n_pairs as i64 + 2;
    let universe: Vec<LineElem> = (0..span)
        .flat_map(|x| [LineElem::Short(x), LineElem::Long(x)])
        .collect();

    let mut found: BTreeSet<Vec<LineElem>> = BTreeSet::new();
    let mut combo = Vec::new();
    pick(&universe, 0, n_pairs, &mut combo, &mut found);

    fn pick(
        universe: &[LineElem],
        start: usize,
        remaining: usize,
        combo: &mut Vec<LineElem>,
        found: &mut BTreeSet<Vec<LineElem>>,
    ) {
        if remaining == 0 {
            if let Some(canonical) = canonicalize(combo) {
                found.insert(canonical);
            }
            return;
        }
        for i in start..universe.len() {
            combo.push(universe[i]);
            // Multisets: the same element may repeat, except identical spans.
            pick(universe, i, remaining - 1, combo, found);
            combo.pop();
        }
    }

    fn canonicalize(combo: &[LineElem]) -> Option<Vec<LineElem>> {
        let mut occupancy: HashMap<i64, usize> = HashMap::new();
        let mut longs = BTreeSet::new();
        for e in combo {
            if let LineElem::Long(x) = e {
                if !longs.insert(*x) {
                    return None; // two pairs over one span
                }
            }
            for (x, n) in e.occupied() {
                *occupancy.entry(x).or_insert(0) += n;
            }
        }
        if occupancy.values().any(|&n| n > 2) {
            return None;
        }
        let min_x = *occupancy.keys().min().unwrap();
        let max_x = *occupancy.keys().max().unwrap();
        if (min_x..=max_x).any(|x| !occupancy.contains_key(&x)) {
            return None; // gap in the line
        }
        let mut canonical: Vec<LineElem> = combo
            .iter()
            .map(|e| match e {
                LineElem::Short(x) => LineElem::Short(x - min_x),
                LineElem::Long(x) => LineElem::Long(x - min_x),
            })
            .collect();
        canonical.sort();
        Some(canonical)
    }

    found
        .into_iter()
        .map(|elems| {
            let mut positions = Vec::new();
            for e in elems {
                match e {
                    LineElem::Short(x) => {
                        positions.push(pt(x, 0));
                        positions.push(pt(x, 0));
                    }
                    LineElem::Long(x) => {
                        positions.push(pt(x, 0));
                        positions.push(pt(x + 1, 0));
                    }
                }
            }
            Configuration::new(positions, BTreeSet::new(), None).expect("valid arrangement")
        })
        .collect()
}
