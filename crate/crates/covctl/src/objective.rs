//! Locational-optimization costs, their quantization/displacement
//! decomposition, and gradients.
//!
//! The cost of a configuration `P` against a partition `W` is
//! `sum_i int_{W_i} f(||q - p_i||) phi(q) dq`. At fixed positions the
//! Voronoi partition is optimal, so the configuration cost is evaluated on
//! the Voronoi cells. For quadratic `f` the parallel axis theorem splits the
//! cost into a quantization part (cell moments about their centroids) plus a
//! displacement part (masses times squared centroid offsets), and the
//! gradient takes the closed form `2 M_i (p_i - C_i)`.

use crate::density::{DensityField, SensingPerformance};
use crate::geometry::{
    cell_moments, integrate, voronoi_diagram, ConvexPolygon, GeometryError, Point2, Vec2,
    VoronoiDiagram,
};
use crate::tol;

/// Errors from cost evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjectiveError {
    #[error("partition has {got} cells for {expected} agents")]
    PartitionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Ordered agent positions; the optimization variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    positions: Vec<Point2>,
}

impl Configuration {
    pub fn new(positions: Vec<Point2>) -> Self {
        assert!(!positions.is_empty(), "a configuration holds n >= 1 agents");
        Self { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> Point2 {
        self.positions[i]
    }

    pub fn set_position(&mut self, i: usize, p: Point2) {
        self.positions[i] = p;
    }

    pub fn inside(&self, region: &ConvexPolygon) -> bool {
        self.positions.iter().all(|&p| {
            region.contains_with_slack(p, tol::VERTEX_DEDUP)
        })
    }

    /// Voronoi diagram of this configuration inside `region`.
    pub fn diagram(&self, region: &ConvexPolygon) -> Result<VoronoiDiagram, GeometryError> {
        voronoi_diagram(region, &self.positions)
    }
}

impl From<Vec<Point2>> for Configuration {
    fn from(positions: Vec<Point2>) -> Self {
        Self::new(positions)
    }
}

/// Total cost with its quantization/displacement split (quadratic `f` only;
/// the parts are absent otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub total: f64,
    pub quantization: Option<f64>,
    pub displacement: Option<f64>,
}

impl CostBreakdown {
    pub fn opaque(total: f64) -> Self {
        Self {
            total,
            quantization: None,
            displacement: None,
        }
    }
}

/// Cost of `P` against an explicit partition of the environment.
pub fn coverage_cost(
    config: &Configuration,
    partition: &[ConvexPolygon],
    f: &SensingPerformance,
    phi: &DensityField,
) -> Result<f64, ObjectiveError> {
    if partition.len() != config.len() {
        return Err(ObjectiveError::PartitionMismatch {
            expected: config.len(),
            got: partition.len(),
        });
    }
    Ok(config
        .positions()
        .iter()
        .zip(partition)
        .map(|(&p, cell)| integrate(cell, |q| f.eval((q - p).norm()) * phi.eval(q)))
        .sum())
}

/// Cost of `P` against its own Voronoi partition, with the quadratic-case
/// decomposition. The total always comes from direct quadrature of
/// `f(||q - p_i||) phi`, so for quadratic `f` the identity
/// `total = quantization + displacement` is a genuine cross-check of two
/// evaluation routes rather than an algebraic tautology.
pub fn coverage_cost_voronoi(
    region: &ConvexPolygon,
    config: &Configuration,
    f: &SensingPerformance,
    phi: &DensityField,
) -> Result<CostBreakdown, ObjectiveError> {
    let diagram = config.diagram(region)?;
    coverage_cost_on_diagram(&diagram, config, f, phi)
}

/// As [`coverage_cost_voronoi`] when the diagram is already available.
pub fn coverage_cost_on_diagram(
    diagram: &VoronoiDiagram,
    config: &Configuration,
    f: &SensingPerformance,
    phi: &DensityField,
) -> Result<CostBreakdown, ObjectiveError> {
    let total = coverage_cost(config, diagram.cells(), f, phi)?;
    if !f.is_quadratic() {
        return Ok(CostBreakdown::opaque(total));
    }
    let mut quantization = 0.0;
    let mut displacement = 0.0;
    for (i, cell) in diagram.cells().iter().enumerate() {
        match cell_moments(cell, phi.as_fn()) {
            Ok(m) => {
                quantization += m.polar_moment_centroid;
                displacement += m.mass * (config.position(i) - m.centroid).norm_squared();
            }
            Err(GeometryError::ZeroMass(_)) => {} // contributes nothing to either part
            Err(e) => return Err(e.into()),
        }
    }
    Ok(CostBreakdown {
        total,
        quantization: Some(quantization),
        displacement: Some(displacement),
    })
}

/// Gradient of the Voronoi-partition cost with respect to each position.
///
/// Quadratic `f` uses the closed form `2 M_i (p_i - C_i)`; general `f`
/// integrates `f'(||q - p||) (p - q)/||q - p||` over the cell, with nodes
/// within [`tol::SINGULARITY_SKIP`] of the position skipped (the integrand
/// is defined as 0 at the singular point, a measure-zero set).
pub fn gradient(
    region: &ConvexPolygon,
    config: &Configuration,
    f: &SensingPerformance,
    phi: &DensityField,
) -> Result<Vec<Vec2>, ObjectiveError> {
    let diagram = config.diagram(region)?;
    let mut out = Vec::with_capacity(config.len());
    for (i, cell) in diagram.cells().iter().enumerate() {
        let p = config.position(i);
        let g = if f.is_quadratic() {
            match cell_moments(cell, phi.as_fn()) {
                Ok(m) => (p - m.centroid) * (2.0 * m.mass),
                Err(GeometryError::ZeroMass(_)) => Vec2::ZERO,
                Err(e) => return Err(e.into()),
            }
        } else {
            Vec2::new(
                integrate(cell, |q| gradient_integrand(p, q, f, phi).x),
                integrate(cell, |q| gradient_integrand(p, q, f, phi).y),
            )
        };
        out.push(g);
    }
    Ok(out)
}

fn gradient_integrand(p: Point2, q: Point2, f: &SensingPerformance, phi: &DensityField) -> Vec2 {
    let d = (q - p).norm();
    if d < tol::SINGULARITY_SKIP {
        return Vec2::ZERO;
    }
    (p - q) * (f.derivative(d) / d * phi.eval(q))
}

/// One-pass moment-route evaluation for quadratic sensing: the cost
/// breakdown (total assembled as quantization + displacement) and the
/// fixed-point residual `max_i ||p_i - C_i||`. Zero-mass cells contribute
/// nothing and pin their agent (residual 0).
pub fn quadratic_cost_residual(
    region: &ConvexPolygon,
    phi: &DensityField,
    config: &Configuration,
) -> Result<(CostBreakdown, f64), ObjectiveError> {
    let diagram = config.diagram(region)?;
    let mut quantization = 0.0;
    let mut displacement = 0.0;
    let mut residual = 0.0f64;
    for (i, cell) in diagram.cells().iter().enumerate() {
        match cell_moments(cell, phi.as_fn()) {
            Ok(m) => {
                let d2 = (config.position(i) - m.centroid).norm_squared();
                quantization += m.polar_moment_centroid;
                displacement += m.mass * d2;
                residual = residual.max(d2.sqrt());
            }
            Err(GeometryError::ZeroMass(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok((
        CostBreakdown {
            total: quantization + displacement,
            quantization: Some(quantization),
            displacement: Some(displacement),
        },
        residual,
    ))
}

/// Worst-case (p-center) cost: the largest distance from any point of the
/// environment to its nearest agent. The inner maximum over each convex
/// cell is attained at a vertex.
pub fn p_center_cost(
    region: &ConvexPolygon,
    config: &Configuration,
) -> Result<f64, ObjectiveError> {
    let diagram = config.diagram(region)?;
    Ok(diagram
        .cells()
        .iter()
        .enumerate()
        .map(|(i, cell)| cell.max_vertex_distance(config.position(i)))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0)
    }

    #[test]
    fn single_agent_cost_is_polar_moment() {
        let cfg = Configuration::new(vec![Point2::new(0.5, 0.5)]);
        let cost = coverage_cost(
            &cfg,
            &[unit_square()],
            &SensingPerformance::Quadratic,
            &DensityField::Uniform,
        )
        .unwrap();
        // square polar moment about its center
        assert!((cost - 1.0 / 6.0).abs() < 1e-12);

        // parallel-axis arithmetic for a corner position
        let corner = Configuration::new(vec![Point2::new(0.0, 0.0)]);
        let cost = coverage_cost(
            &corner,
            &[unit_square()],
            &SensingPerformance::Quadratic,
            &DensityField::Uniform,
        )
        .unwrap();
        assert!((cost - (1.0 / 6.0 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn partition_mismatch_detected() {
        let cfg = Configuration::new(vec![Point2::new(0.5, 0.5)]);
        let err = coverage_cost(
            &cfg,
            &[unit_square(), unit_square()],
            &SensingPerformance::Quadratic,
            &DensityField::Uniform,
        )
        .unwrap_err();
        assert_eq!(
            err,
            ObjectiveError::PartitionMismatch {
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn voronoi_cost_matches_explicit_partition() {
        let cfg = Configuration::new(vec![Point2::new(0.3, 0.4), Point2::new(0.8, 0.7)]);
        let diagram = cfg.diagram(&unit_square()).unwrap();
        let f = SensingPerformance::Quadratic;
        let phi = DensityField::Uniform;
        let direct = coverage_cost(&cfg, diagram.cells(), &f, &phi).unwrap();
        let breakdown = coverage_cost_voronoi(&unit_square(), &cfg, &f, &phi).unwrap();
        assert!((direct - breakdown.total).abs() < 1e-12);
    }

    #[test]
    fn centroidal_two_agent_breakdown() {
        // the centroidal two-agent configuration in the unit square
        let cfg = Configuration::new(vec![Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)]);
        let b = coverage_cost_voronoi(
            &unit_square(),
            &cfg,
            &SensingPerformance::Quadratic,
            &DensityField::Uniform,
        )
        .unwrap();
        assert!(b.displacement.unwrap().abs() < 1e-12);
        // each half is a 0.5 x 1 rectangle: J about centroid = (1/12) M (w^2 + h^2)
        let expect = 2.0 * (1.0 / 12.0) * 0.5 * (0.25 + 1.0);
        assert!((b.quantization.unwrap() - expect).abs() < 1e-9);
        assert!((b.total - expect).abs() < 1e-9);
    }

    #[test]
    fn breakdown_absent_for_custom_f() {
        let cfg = Configuration::new(vec![Point2::new(0.5, 0.5)]);
        let f = SensingPerformance::custom(|d| d, |_| 1.0);
        let b = coverage_cost_voronoi(&unit_square(), &cfg, &f, &DensityField::Uniform).unwrap();
        assert!(b.quantization.is_none() && b.displacement.is_none());
        assert!(b.total > 0.0);
    }

    #[test]
    fn gradient_vanishes_at_centroidal_configuration() {
        let cfg = Configuration::new(vec![Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)]);
        let g = gradient(
            &unit_square(),
            &cfg,
            &SensingPerformance::Quadratic,
            &DensityField::Uniform,
        )
        .unwrap();
        for gi in g {
            assert!(gi.norm() < 1e-12);
        }
    }

    #[test]
    fn p_center_examples() {
        let center = Configuration::new(vec![Point2::new(0.5, 0.5)]);
        let v = p_center_cost(&unit_square(), &center).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);

        let corner = Configuration::new(vec![Point2::new(0.0, 0.0)]);
        let v = p_center_cost(&unit_square(), &corner).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);

        let two = Configuration::new(vec![Point2::new(0.25, 0.5), Point2::new(0.75, 0.5)]);
        let v = p_center_cost(&unit_square(), &two).unwrap();
        assert!((v - 0.3125f64.sqrt()).abs() < 1e-12);
    }
}
