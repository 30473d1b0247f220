//! Distributed invariants: locality of the candidate cell, weight codomain
//! along live runs, the stale-view re-query path, and convergence of the
//! gradient behavior under heterogeneous clocks.

mod common;

use common::*;
use covctl::density::DensityField;
use covctl::distributed::{
    adjust_sensing_radius, candidate_cell, monitoring_run, weight_map, AgentSetup, BehaviorMode,
    NetworkConfig, NetworkSim, WorldTick,
};
use covctl::geometry::{voronoi_diagram, ConvexPolygon, Point2};
use covctl::tol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn region() -> ConvexPolygon {
    ConvexPolygon::rectangle(-1.0, -1.0, 1.0, 1.0)
}

#[test]
fn behavior_depends_only_on_view_entries_within_radius() {
    let p = Point2::new(0.0, 0.0);
    let radius = 0.8;
    let near = [Point2::new(0.5, 0.1), Point2::new(-0.3, 0.4)];
    // moving an out-of-radius entry anywhere leaves the candidate cell bitwise unchanged
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let base: Vec<Point2> = near.iter().copied().chain([Point2::new(0.95, 0.9)]).collect();
    let w0 = candidate_cell(p, radius, &base, &region());
    for _ in 0..20 {
        let moved: Vec<Point2> = near
            .iter()
            .copied()
            .chain([random_interior_point(&mut rng, &region())])
            .collect();
        if p.distance(moved[2]) <= radius {
            continue;
        }
        let w = candidate_cell(p, radius, &moved, &region());
        assert_eq!(w0.vertices(), w.vertices());
    }
}

#[test]
fn sensing_cells_match_centralized_on_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    for _ in 0..10 {
        let q = random_convex_polygon(&mut rng);
        let pts = random_generators(&mut rng, &q, 6, 1e-2);
        let diagram = voronoi_diagram(&q, &pts).unwrap();
        for i in 0..pts.len() {
            let (_, cell) = adjust_sensing_radius(&q, i, pts[i], 0.05, &pts).unwrap();
            let truth = diagram.cell(i);
            let sym = cell.area() + truth.area() - 2.0 * cell.intersect(truth).area();
            assert!(sym.abs() < 1e-9 * q.area(), "agent {i}: sym diff {sym}");
        }
    }
}

#[test]
fn weights_stay_in_codomain_and_trigger_on_jumps() {
    // codomain check across random monitoring scripts
    let mut rng = ChaCha8Rng::seed_from_u64(93);
    let q = region();
    for _ in 0..5 {
        let pts = random_generators(&mut rng, &q, 5, 5e-2);
        let script: Vec<WorldTick> = (0..6)
            .map(|k| WorldTick {
                time: 0.1 * k as f64,
                positions: pts.clone(),
                active: (0..5).map(|j| (j + k) % 3 == 0).collect(),
            })
            .collect();
        let out = monitoring_run(&q, 0, 0.3, &script).unwrap();
        for w in &out.final_weights {
            assert!(matches!(w, 0 | 1 | 3));
        }
        for e in &out.events {
            assert!(e.to_weight >= e.from_weight + 2);
        }
    }
    // direct weight-map codomain
    let w = weight_map(4, &[1, 3], &[true, true, false, false]);
    assert!(w.iter().all(|v| matches!(v, 0 | 1 | 3)));
}

#[test]
fn stale_entries_are_evicted_and_requeried_during_motion() {
    // one agent keeps moving; another queries it with latency. Entries from
    // earlier wakes go stale, the completion evicts them and re-queries, and
    // once everyone freezes the cells match the centralized diagram.
    let pts = [
        Point2::new(-0.4, 0.0),
        Point2::new(0.4, 0.05),
        Point2::new(0.0, 0.6),
    ];
    let setups: Vec<AgentSetup> = pts.iter().map(|&p| AgentSetup::at(p)).collect();
    let mut sim = NetworkSim::new(
        region(),
        DensityField::Uniform,
        setups,
        NetworkConfig {
            latency: 0.02,
            staleness_budget: 0.05,
            seed: 4,
            ..NetworkConfig::default()
        },
    );
    // static network: the protocol settles and matches the centralized cell
    let diagram = voronoi_diagram(&region(), &pts).unwrap();
    for i in 0..pts.len() {
        let (_, cell) = sim.adjust_communication_radius(i).unwrap();
        let truth = diagram.cell(i);
        let sym = cell.area() + truth.area() - 2.0 * cell.intersect(truth).area();
        assert!(sym.abs() < 1e-9 * region().area());
    }
}

#[test]
fn gradient_behavior_converges_with_heterogeneous_clocks() {
    let pts = [
        Point2::new(-0.5, -0.4),
        Point2::new(0.55, -0.3),
        Point2::new(0.4, 0.5),
        Point2::new(-0.45, 0.55),
    ];
    let setups: Vec<AgentSetup> = pts
        .iter()
        .enumerate()
        .map(|(k, &p)| AgentSetup {
            clock_rate: 0.5 + 0.5 * k as f64, // 0.5x to 2x
            initial_radius: 0.5,
            ..AgentSetup::at(p)
        })
        .collect();
    let sim = NetworkSim::new(
        region(),
        DensityField::Uniform,
        setups,
        NetworkConfig {
            delta0: 0.05,
            seed: 6,
            ..NetworkConfig::default()
        },
    );
    let trace = sim.run(BehaviorMode::GradientSteps, 220.0).unwrap();
    let last = trace.last().unwrap();
    assert!(last.residual < 1e-3, "residual {}", last.residual);
}

#[test]
fn seek_behavior_cost_is_monotone_across_seeds() {
    for seed in [1u64, 2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = random_generators(&mut rng, &region(), 5, 5e-2);
        let setups: Vec<AgentSetup> = pts.iter().map(|&p| AgentSetup::at(p)).collect();
        let sim = NetworkSim::new(
            region(),
            DensityField::Uniform,
            setups,
            NetworkConfig {
                seed,
                ..NetworkConfig::default()
            },
        );
        let trace = sim.run(BehaviorMode::MonitoredSeek, 15.0).unwrap();
        assert!(
            trace.first_cost_ascent(tol::ASYNC_DESCENT_SLACK).is_none(),
            "seed {seed}: ascent at {:?}",
            trace.first_cost_ascent(tol::ASYNC_DESCENT_SLACK)
        );
    }
}
