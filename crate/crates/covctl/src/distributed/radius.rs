//! Distributed Voronoi cell computation by growing a sensing radius.
//!
//! An agent detects the others within its radius, builds the radius-limited
//! candidate cell, and grows the radius to twice the farthest candidate-cell
//! vertex until the radius covers that bound. The candidate then equals the
//! true Voronoi cell: every Voronoi neighbor lies within the final radius,
//! and the disk approximation is non-binding because the whole cell sits
//! within half the radius.

use super::{candidate_cell, DistributedError};
use crate::geometry::{ConvexPolygon, Point2};
use crate::tol;

/// Run the radius-growing loop against a static snapshot of true positions
/// (detection within the current radius models the sensor). Returns the
/// minimum adequate radius and the finished cell.
pub fn adjust_sensing_radius(
    region: &ConvexPolygon,
    agent: usize,
    position: Point2,
    initial_radius: f64,
    snapshot: &[Point2],
) -> Result<(f64, ConvexPolygon), DistributedError> {
    let detect = |radius: f64| -> Vec<Point2> {
        snapshot
            .iter()
            .enumerate()
            .filter(|&(j, &p)| j != agent && position.distance(p) <= radius)
            .map(|(_, &p)| p)
            .collect()
    };

    let mut radius = initial_radius.max(tol::DUPLICATE_GENERATORS);
    let mut view = detect(radius);
    let mut cell = candidate_cell(position, radius, &view, region);
    let mut iterations = 0;
    while radius < 2.0 * cell.max_vertex_distance(position) {
        iterations += 1;
        if iterations > tol::MAX_RADIUS_ITERATIONS {
            return Err(DistributedError::NonTermination { agent });
        }
        radius = 2.0 * cell.max_vertex_distance(position);
        view = detect(radius);
        cell = candidate_cell(position, radius, &view, region);
    }
    // tighten to the minimum adequate radius
    radius = 2.0 * cell.max_vertex_distance(position);
    Ok((radius, cell))
}
