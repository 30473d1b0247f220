//! Deterministic discrete-event simulation of asynchronous agents with
//! radius-limited sensing or communication.
//!
//! Agents share no state: each one works from its own view of the other
//! agents' positions, gathered either by detection within a sensing radius
//! or by request/response messages within a communication radius. The
//! simulator itself is single-threaded and a pure function of the scenario
//! and seed; simultaneous events are ordered by `(time, agent, sequence)`.

mod monitor;
mod radius;
mod sim;

pub use monitor::{monitoring_run, MonitorEvent, MonitorOutcome, WorldTick};
pub use radius::adjust_sensing_radius;
pub use sim::{AgentSetup, BehaviorMode, NetworkConfig, NetworkSim};

use crate::geometry::{ConvexPolygon, GeometryError, HalfPlane, Point2};
use crate::objective::{CostBreakdown, ObjectiveError};

/// Errors from the distributed layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DistributedError {
    /// The radius-adjustment loop exceeded its iteration guard; cannot occur
    /// for valid inputs and signals geometry corruption.
    #[error("radius adjustment for agent {agent} did not terminate")]
    NonTermination { agent: usize },
    /// A behavior thread starved past the agent's fairness bound.
    #[error("agent {agent}: {thread} thread starved past its fairness bound")]
    FairnessViolation { agent: usize, thread: &'static str },
    /// A seek move ended farther from its commanded target than it started;
    /// the admissibility properties of the induced configuration map are
    /// broken, indicating a policy bug.
    #[error("agent {agent} moved away from its commanded centroid target")]
    PropertyViolation { agent: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// What one agent knows about another: a position and the time it was
/// sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewEntry {
    pub position: Point2,
    pub freshness: f64,
}

/// One row of a simulation trace: global time, true agent positions, the
/// centralized cost of the true configuration, the fixed-point residual, and
/// an annotation naming the event that produced the row.
#[derive(Debug, Clone)]
pub struct SimRecord {
    pub time: f64,
    pub positions: Vec<Point2>,
    pub cost: CostBreakdown,
    pub residual: f64,
    pub annotation: String,
}

/// Event-ordered trace of a distributed run.
#[derive(Debug, Clone, Default)]
pub struct SimTrace {
    pub records: Vec<SimRecord>,
}

impl SimTrace {
    /// First record index where the global cost rose by more than `slack`.
    pub fn first_cost_ascent(&self, slack: f64) -> Option<usize> {
        self.records
            .windows(2)
            .position(|w| w[1].cost.total > w[0].cost.total + slack)
    }

    pub fn last(&self) -> Option<&SimRecord> {
        self.records.last()
    }
}

/// Number of sides of the polygon circumscribed around the sensing disk.
pub(crate) const DISK_SIDES: usize = 64;

/// Radius-limited candidate cell: the environment, intersected with a
/// regular polygon circumscribed around the disk of radius `radius` (so
/// the candidate remains a superset of the true cell and the termination
/// bound of the radius loop stays valid), intersected with the bisector
/// half-planes toward every viewed agent within the radius.
///
/// View entries beyond the radius are ignored, so the result depends only
/// on local information.
pub fn candidate_cell(
    position: Point2,
    radius: f64,
    view: &[Point2],
    region: &ConvexPolygon,
) -> ConvexPolygon {
    let mut cell = region.clone();
    for k in 0..DISK_SIDES {
        if cell.is_empty() {
            return cell;
        }
        let angle = 2.0 * std::f64::consts::PI * k as f64 / DISK_SIDES as f64;
        let dir = crate::geometry::Vec2::new(angle.cos(), angle.sin());
        // tangent line of the disk: (q - p) . dir <= radius
        cell = cell.clip(&HalfPlane::new(-dir, -(dir.dot(position.to_vec()) + radius)));
    }
    for &other in view {
        if cell.is_empty() {
            break;
        }
        let d = position.distance(other);
        if d > 0.0 && d <= radius {
            cell = cell.clip(&HalfPlane::bisector_toward(position, other));
        }
    }
    cell
}

/// Weights an agent assigns to the others: 3 for an active Voronoi
/// neighbor, 1 for an inactive one, 0 for everyone else. Cell-maintenance
/// triggers fire exactly on jumps of at least 2 (a neighbor becoming
/// active, or an active agent newly becoming a neighbor).
pub fn weight_map(n_agents: usize, neighbors: &[usize], active: &[bool]) -> Vec<u8> {
    let mut w = vec![0u8; n_agents];
    for &j in neighbors {
        w[j] = if active[j] { 3 } else { 1 };
    }
    w
}

/// Voronoi neighbors recoverable from a finished cell: agents whose bisector
/// carries one of the cell's edges.
pub(crate) fn neighbors_of_cell(
    cell: &ConvexPolygon,
    position: Point2,
    others: &[(usize, Point2)],
) -> Vec<usize> {
    use crate::geometry::cell_face_with;
    use crate::tol;
    others
        .iter()
        .filter(|&&(_, p)| {
            cell_face_with(cell, position, p)
                .is_some_and(|face| face.length() > tol::FACE_MIN_LENGTH)
        })
        .map(|&(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::voronoi_diagram;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn candidate_cell_with_covering_radius_is_region() {
        // central agent, radius beyond the diameter: every tangent line of
        // the disk clears the region, so W = Q
        let p = Point2::new(0.5, 0.5);
        let w = candidate_cell(p, 4.0, &[], &unit_square());
        assert_eq!(w.vertices().len(), 4);
        assert!((w.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn candidate_cell_single_bisector() {
        let p = Point2::new(0.25, 0.5);
        let q = Point2::new(0.75, 0.5);
        let w = candidate_cell(p, 10.0, &[q], &unit_square());
        // clipped by the x = 0.5 bisector only
        assert!((w.area() - 0.5).abs() < 1e-12);
        let (_, hi) = w.bounding_box();
        assert!((hi.x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn candidate_cell_ignores_out_of_radius_entries() {
        let p = Point2::new(0.25, 0.5);
        let near = Point2::new(0.75, 0.5);
        let far = Point2::new(0.95, 0.95);
        let r = 0.6; // near is within range, far is not
        let w1 = candidate_cell(p, r, &[near, far], &unit_square());
        let w2 = candidate_cell(p, r, &[near], &unit_square());
        assert_eq!(w1.vertices(), w2.vertices());
    }

    #[test]
    fn candidate_cell_with_full_view_matches_centralized() {
        let pts = [
            Point2::new(0.21, 0.31),
            Point2::new(0.71, 0.28),
            Point2::new(0.52, 0.74),
            Point2::new(0.13, 0.82),
        ];
        let diagram = voronoi_diagram(&unit_square(), &pts).unwrap();
        for i in 0..pts.len() {
            let view: Vec<Point2> = pts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p)
                .collect();
            let w = candidate_cell(pts[i], 10.0, &view, &unit_square());
            let cell = diagram.cell(i);
            let sym_diff = w.area() + cell.area() - 2.0 * w.intersect(cell).area();
            assert!(sym_diff.abs() < 1e-9, "agent {i}: sym diff {sym_diff}");
        }
    }

    #[test]
    fn weight_map_table() {
        let neighbors = [1, 2];
        let active = [false, true, false, true];
        let w = weight_map(4, &neighbors, &active);
        assert_eq!(w, vec![0, 3, 1, 0]);
    }
}
