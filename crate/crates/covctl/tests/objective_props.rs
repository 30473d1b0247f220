//! Cost and gradient invariants: optimality of the Voronoi assignment,
//! centroid optimality for fixed partitions, the quantization/displacement
//! identity, and finite-difference validation of the gradients.

mod common;

use common::*;
use covctl::density::{DensityField, SensingPerformance};
use covctl::geometry::{ConvexPolygon, Point2, Vec2};
use covctl::objective::{
    coverage_cost, coverage_cost_voronoi, gradient, quadratic_cost_residual, Configuration,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_square() -> ConvexPolygon {
    ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0)
}

#[test]
fn voronoi_assignment_beats_other_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let region = unit_square();
    let f = SensingPerformance::Quadratic;
    let phi = DensityField::Uniform;
    let config = Configuration::new(random_generators(&mut rng, &region, 5, 1e-2));
    let own = coverage_cost_voronoi(&region, &config, &f, &phi)
        .unwrap()
        .total;
    for _ in 0..20 {
        // a valid partition that is not V(P): the Voronoi cells of perturbed
        // generators
        let perturbed: Vec<Point2> = config
            .positions()
            .iter()
            .map(|&p| {
                region.project(Point2::new(
                    p.x + rng.gen_range(-0.2..0.2),
                    p.y + rng.gen_range(-0.2..0.2),
                ))
            })
            .collect();
        let partition = covctl::geometry::voronoi_diagram(&region, &perturbed)
            .unwrap()
            .into_cells();
        let other = coverage_cost(&config, &partition, &f, &phi).unwrap();
        assert!(
            own <= other + 1e-12,
            "voronoi partition lost: {own} vs {other}"
        );
    }
}

#[test]
fn centroids_beat_other_positions_for_fixed_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let region = unit_square();
    let f = SensingPerformance::Quadratic;
    let phi = DensityField::Uniform;
    for _ in 0..10 {
        let generators = random_generators(&mut rng, &region, 4, 1e-2);
        let partition = covctl::geometry::voronoi_diagram(&region, &generators)
            .unwrap()
            .into_cells();
        let centroids: Vec<Point2> = partition
            .iter()
            .map(|cell| {
                covctl::geometry::cell_moments(cell, |_| 1.0)
                    .unwrap()
                    .centroid
            })
            .collect();
        let at_centroids = coverage_cost(
            &Configuration::new(centroids),
            &partition,
            &f,
            &phi,
        )
        .unwrap();
        let elsewhere = coverage_cost(
            &Configuration::new(random_generators(&mut rng, &region, 4, 1e-2)),
            &partition,
            &f,
            &phi,
        )
        .unwrap();
        assert!(at_centroids <= elsewhere + 1e-12);
    }
}

#[test]
fn breakdown_identity_total_equals_parts() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let region = unit_square();
    let f = SensingPerformance::Quadratic;
    for phi in [
        DensityField::Uniform,
        DensityField::Gaussian {
            center: Point2::new(0.4, 0.6),
            gain: 3.0,
        },
    ] {
        for _ in 0..5 {
            let config = Configuration::new(random_generators(&mut rng, &region, 6, 1e-2));
            let b = coverage_cost_voronoi(&region, &config, &f, &phi).unwrap();
            let parts = b.quantization.unwrap() + b.displacement.unwrap();
            assert!(
                (b.total - parts).abs() <= 1e-9 * (1.0 + b.total.abs()),
                "identity broke: total {} vs parts {parts}",
                b.total
            );
        }
    }
}

/// Central finite differences of the Voronoi cost in every coordinate.
fn fd_gradient(
    region: &ConvexPolygon,
    config: &Configuration,
    f: &SensingPerformance,
    phi: &DensityField,
    step: f64,
) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(config.len());
    for i in 0..config.len() {
        let mut grad = Vec2::ZERO;
        for axis in 0..2 {
            let mut plus = config.clone();
            let mut minus = config.clone();
            let p = config.position(i);
            let (dp, dm) = if axis == 0 {
                (Point2::new(p.x + step, p.y), Point2::new(p.x - step, p.y))
            } else {
                (Point2::new(p.x, p.y + step), Point2::new(p.x, p.y - step))
            };
            plus.set_position(i, dp);
            minus.set_position(i, dm);
            let fp = coverage_cost_voronoi(region, &plus, f, phi).unwrap().total;
            let fm = coverage_cost_voronoi(region, &minus, f, phi).unwrap().total;
            let d = (fp - fm) / (2.0 * step);
            if axis == 0 {
                grad.x = d;
            } else {
                grad.y = d;
            }
        }
        out.push(grad);
    }
    out
}

#[test]
fn quadratic_gradient_matches_finite_differences() {
    let region = unit_square();
    let f = SensingPerformance::Quadratic;
    for phi in [
        DensityField::Uniform,
        DensityField::Gaussian {
            center: Point2::new(0.3, 0.4),
            gain: 5.0,
        },
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..5 {
            let config = Configuration::new(random_generators(&mut rng, &region, 5, 5e-2));
            let closed = gradient(&region, &config, &f, &phi).unwrap();
            let fd = fd_gradient(&region, &config, &f, &phi, 1e-5);
            for (g, h) in closed.iter().zip(&fd) {
                let denom = g.norm().max(1e-6);
                assert!(
                    (*g - *h).norm() / denom < 1e-4,
                    "gradient {g:?} vs FD {h:?}"
                );
            }
        }
    }
}

#[test]
fn custom_performance_gradient_matches_finite_differences() {
    // f(d) = d has an integrable gradient singularity at the agent
    let region = unit_square();
    let f = SensingPerformance::custom(|d| d, |_| 1.0);
    let phi = DensityField::Uniform;
    let config = Configuration::new(vec![Point2::new(0.3, 0.55)]);
    let closed = gradient(&region, &config, &f, &phi).unwrap();
    let fd = fd_gradient(&region, &config, &f, &phi, 1e-5);
    assert!(
        (closed[0] - fd[0]).norm() / fd[0].norm().max(1e-6) < 1e-3,
        "{:?} vs {:?}",
        closed[0],
        fd[0]
    );
}

#[test]
fn moment_route_cost_matches_direct_quadrature_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let region = unit_square();
    let f = SensingPerformance::Quadratic;
    let phi = DensityField::Gaussian {
        center: Point2::new(0.5, 0.5),
        gain: 2.0,
    };
    for _ in 0..5 {
        let config = Configuration::new(random_generators(&mut rng, &region, 6, 1e-2));
        let direct = coverage_cost_voronoi(&region, &config, &f, &phi).unwrap();
        let (moment_route, _) = quadratic_cost_residual(&region, &phi, &config).unwrap();
        assert!(
            (direct.total - moment_route.total).abs() <= 1e-9 * (1.0 + direct.total),
            "{} vs {}",
            direct.total,
            moment_route.total
        );
    }
}
