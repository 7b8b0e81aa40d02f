//! Checks the flow-based route counting against two independent oracles:
//! exhaustive single-point removal (which free point, if any, chokes off a
//! surface point) and, on tiny windows, literal enumeration of route pairs.

mod common;

use std::collections::BTreeSet;

use common::{cut_non_coating, pt, route_pair_exists};
use pairbot_core::analysis::{
    coating_set, disjoint_route_count, non_coating_set, surface_set, AnalysisOptions, SourceMode,
};
use pairbot_core::geometry::{neighbors, Point};
use pairbot_core::model::Configuration;

fn config(object: &[(i64, i64)], robots: &[(i64, i64)]) -> Configuration {
    let object: BTreeSet<Point> = object.iter().map(|&(x, y)| pt(x, y)).collect();
    let positions = robots.iter().map(|&(x, y)| pt(x, y)).collect();
    Configuration::new(positions, object, None).unwrap()
}

fn opts(margin: i64, source_mode: SourceMode) -> AnalysisOptions {
    AnalysisOptions {
        margin,
        source_mode,
    }
}

/// Shapes exercising the interesting boundary situations: open surfaces,
/// dead-end pockets, sealed chambers, corridors, robots close to and far
/// from the object.
fn catalog() -> Vec<(&'static str, Configuration)> {
    vec![
        ("single cell, pair far west", config(&[(3, 0)], &[(-2, 0), (-2, 0)])),
        (
            "bar of three, pair adjacent",
            config(&[(1, 0), (2, 0), (3, 0)], &[(0, 0), (0, 0)]),
        ),
        (
            "ell blob, two pairs",
            config(
                &[(2, 0), (3, 0), (4, 0), (2, -1), (2, -2)],
                &[(0, 0), (0, 0), (0, 1), (0, 1)],
            ),
        ),
        (
            "ring with a one-point mouth",
            config(
                &[(2, -1), (1, -1), (0, 0), (0, 1), (1, 1)],
                &[(-2, 0), (-2, 0)],
            ),
        ),
        (
            "sealed chamber",
            config(
                &[(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)],
                &[(3, 0), (3, 0)],
            ),
        ),
        (
            "long wall, pairs on both sides",
            config(
                &[(0, -2), (0, -1), (0, 0), (0, 1), (0, 2)],
                &[(-3, 0), (-3, 0), (3, 0), (3, 0)],
            ),
        ),
    ]
}

#[test]
fn flow_count_matches_single_removal_oracle() {
    for (name, c) in catalog() {
        let options = opts(3, SourceMode::AnyRobot);
        let flow = non_coating_set(&c, &options);
        let oracle = cut_non_coating(&c, 3);
        assert_eq!(flow, oracle, "disagreement on {name}");
    }
}

#[test]
fn hopeless_and_coatable_points_partition_the_surface() {
    for (name, c) in catalog() {
        let options = opts(3, SourceMode::AnyRobot);
        let surface = surface_set(&c);
        let non = non_coating_set(&c, &options);
        let coat = coating_set(&c, &options);
        assert!(non.is_subset(&surface), "{name}: hopeless points off-surface");
        assert!(coat.is_subset(&surface), "{name}: coatable points off-surface");
        assert!(non.is_disjoint(&coat), "{name}: partition overlaps");
        let union: BTreeSet<Point> = non.union(&coat).copied().collect();
        assert_eq!(union, surface, "{name}: partition misses points");
    }
}

#[test]
fn analysis_is_translation_invariant() {
    for (name, c) in catalog() {
        let options = opts(3, SourceMode::AnyRobot);
        let moved = c.translated(17, -9);
        let from_moved = non_coating_set(&moved, &options);
        let moved_from: BTreeSet<Point> = non_coating_set(&c, &options)
            .into_iter()
            .map(|p| p.translate(17, -9))
            .collect();
        assert_eq!(from_moved, moved_from, "translation changed {name}");
    }
}

#[test]
fn flow_count_matches_literal_route_pairs_on_micro_shapes() {
    // Margin one keeps the windows small enough for the literal path
    // enumeration; the semantics are the same at any margin.
    let micro = vec![
        config(&[(1, 0)], &[(-1, 0), (-1, 0)]),
        config(&[(1, 0), (2, 0)], &[(0, 0), (0, 0)]),
        config(&[(1, 0), (1, 1)], &[(0, 0), (0, 0), (2, 0), (2, 0)]),
        config(&[(1, 0), (2, -1), (1, 1)], &[(0, 0), (0, 0)]),
        // Ring with a dead-end pocket: its interior hangs on one doorway.
        config(&[(2, -1), (1, -1), (0, 0), (0, 1), (1, 1)], &[(3, 0), (3, 0)]),
    ];
    for (i, c) in micro.iter().enumerate() {
        let options = opts(1, SourceMode::AnyRobot);
        for p in surface_set(c) {
            let by_flow = disjoint_route_count(c, p, &options) >= 2;
            let by_paths = route_pair_exists(c, p, 1);
            assert_eq!(by_flow, by_paths, "shape {i}, point {p:?}");
        }
    }
}

#[test]
fn relaxing_the_source_rule_never_loses_routes() {
    for (name, c) in catalog() {
        for p in surface_set(&c) {
            let any = disjoint_route_count(&c, p, &opts(3, SourceMode::AnyRobot));
            let distinct = disjoint_route_count(&c, p, &opts(3, SourceMode::DistinctRobots));
            let single = disjoint_route_count(&c, p, &opts(3, SourceMode::SingleRobot));
            assert!(any >= distinct, "{name} at {p:?}: distinct exceeded any");
            assert!(any >= single, "{name} at {p:?}: single exceeded any");
        }
    }
}

#[test]
fn lone_robot_point_caps_distinct_sources_at_one_route() {
    // One pair standing on one point: unrestricted counting lets the point
    // send both members, the one-per-point rule does not.
    let c = config(&[(5, 0)], &[(0, 0), (0, 0)]);
    let target = pt(4, 0);
    assert!(disjoint_route_count(&c, target, &opts(3, SourceMode::AnyRobot)) >= 2);
    assert_eq!(
        disjoint_route_count(&c, target, &opts(3, SourceMode::DistinctRobots)),
        1
    );
}

#[test]
fn pocketed_robots_fail_the_single_source_rule_together() {
    // Two robots, each walled into a pocket whose only exit opens into the
    // chamber around the target. Either robot alone is choked by its own
    // doorway; the two of them together supply separated routes.
    let ring = [(1, -1), (0, -1), (-1, 1), (0, 1)];
    let east_pocket = [(3, 0), (3, -1), (2, -1), (1, 1), (2, 1)];
    let west_pocket = [(-1, -1), (-2, -1), (-3, 0), (-3, 1), (-2, 1)];
    let object: Vec<(i64, i64)> = ring
        .iter()
        .chain(east_pocket.iter())
        .chain(west_pocket.iter())
        .copied()
        .collect();
    let c = config(&object, &[(2, 0), (2, 0), (-2, 0), (-2, 0)]);
    let target = pt(0, 0);

    // The doorways really are the only ways in.
    for doorway in [pt(1, 0), pt(-1, 0)] {
        assert!(!c.object().contains(&doorway));
        assert!(neighbors(target).contains(&doorway));
    }

    assert!(disjoint_route_count(&c, target, &opts(3, SourceMode::AnyRobot)) >= 2);
    assert!(disjoint_route_count(&c, target, &opts(3, SourceMode::DistinctRobots)) >= 2);
    assert_eq!(
        disjoint_route_count(&c, target, &opts(3, SourceMode::SingleRobot)),
        1
    );
}

#[test]
fn widening_the_window_does_not_change_the_verdict() {
    for (name, c) in catalog() {
        let narrow = non_coating_set(&c, &opts(3, SourceMode::AnyRobot));
        let wide = non_coating_set(&c, &opts(6, SourceMode::AnyRobot));
        assert_eq!(narrow, wide, "margin changed the verdict on {name}");
    }
}
