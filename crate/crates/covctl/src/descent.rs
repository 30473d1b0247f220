//! Lloyd descent: the continuous-time gradient flow toward cell centroids,
//! the discrete Lloyd map family with its admissibility properties, and the
//! worst-case (p-center) heuristic step.
//!
//! The continuous flow `dp_i/dt = -k (p_i - C_{V_i})` is integrated with
//! fixed-step RK4, recomputing the Voronoi diagram at every stage
//! evaluation; descent of the cost is verified a posteriori rather than
//! assumed. Discrete maps are iterated under a monitor that enforces the two
//! admissibility properties: (a) no agent moves away from its current cell
//! centroid, and (b) while the configuration is not centroidal, some agent
//! strictly approaches its centroid.

use crate::density::DensityField;
use crate::geometry::{
    cell_moments, min_enclosing_ball_center, ConvexPolygon, GeometryError, Point2, Vec2,
};
use crate::objective::{Configuration, CostBreakdown, ObjectiveError};
use crate::tol;

/// Errors from descent iteration.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DescentError {
    /// The supplied map violated admissibility property (a) or (b); it is
    /// not a Lloyd variant.
    #[error("agent {agent} violated descent property ({property}) at iteration {iteration}")]
    PropertyViolation {
        agent: usize,
        iteration: usize,
        property: char,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Sampled trajectory of a flow: times, configurations, and cost breakdowns,
/// one entry per accepted step. Zero-mass holds (agents frozen for a step
/// because their cell carried no density mass) are logged aside.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub states: Vec<Configuration>,
    pub costs: Vec<CostBreakdown>,
    /// `max_i ||p_i - C_{V_i}||` per entry.
    pub residuals: Vec<f64>,
    /// `(step, agent)` pairs where a zero-mass cell froze the agent.
    pub zero_mass_holds: Vec<(usize, usize)>,
}

impl FlowTrace {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            costs: Vec::new(),
            residuals: Vec::new(),
            zero_mass_holds: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, state: Configuration, cost: CostBreakdown, residual: f64) {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        self.times.push(t);
        self.states.push(state);
        self.costs.push(cost);
        self.residuals.push(residual);
    }

    pub fn last_state(&self) -> Option<&Configuration> {
        self.states.last()
    }

    pub fn last_cost(&self) -> Option<&CostBreakdown> {
        self.costs.last()
    }

    /// First index where the total cost increased beyond
    /// `slack * (1 + |H|)`, if any.
    pub fn first_ascent(&self, slack: f64) -> Option<usize> {
        self.costs.windows(2).position(|w| {
            let prev = w[0].total;
            let next = w[1].total;
            next > prev + slack * (1.0 + prev.abs())
        })
    }
}

impl Default for FlowTrace {
    fn default() -> Self {
        Self::new()
    }
}

/// Outcome of a discrete descent iteration.
#[derive(Debug, Clone)]
pub struct DescentReport {
    pub final_config: Configuration,
    pub iterations: usize,
    pub converged: bool,
    /// `max_i ||p_i - C_{V_i}||` at the final configuration.
    pub residual: f64,
}

/// Parameters of the continuous Lloyd flow integrator.
#[derive(Debug, Clone, Copy)]
pub struct FlowParams {
    /// Proportional gain of the centroid-seeking law.
    pub k_prop: f64,
    /// Fixed RK4 step size.
    pub step: f64,
    pub max_steps: usize,
    /// Stop once `max_i ||p_i - C_{V_i}|| < tol`.
    pub tol: f64,
}

/// Per-agent cell centroids for the current Voronoi partition; `None` marks
/// a zero-mass cell whose centroid is undefined.
pub fn cell_centroids(
    region: &ConvexPolygon,
    phi: &DensityField,
    config: &Configuration,
) -> Result<Vec<Option<Point2>>, GeometryError> {
    let diagram = config.diagram(region)?;
    diagram
        .cells()
        .iter()
        .map(|cell| match cell_moments(cell, phi.as_fn()) {
            Ok(m) => Ok(Some(m.centroid)),
            Err(GeometryError::ZeroMass(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// `max_i ||p_i - C_{V_i}||`; zero-mass agents are pinned and contribute 0.
pub fn residual(
    region: &ConvexPolygon,
    phi: &DensityField,
    config: &Configuration,
) -> Result<f64, GeometryError> {
    let centroids = cell_centroids(region, phi, config)?;
    Ok(config
        .positions()
        .iter()
        .zip(&centroids)
        .map(|(&p, c)| c.map_or(0.0, |c| (p - c).norm()))
        .fold(0.0, f64::max))
}

/// Whether every agent sits on its own cell centroid within `tol`.
pub fn is_centroidal(
    region: &ConvexPolygon,
    phi: &DensityField,
    config: &Configuration,
    tol: f64,
) -> Result<bool, GeometryError> {
    Ok(residual(region, phi, config)? < tol)
}

/// Integrate the centroid-seeking gradient flow with fixed-step RK4,
/// recomputing the partition at every stage. Stops at the residual tolerance
/// or after `max_steps`. The recorded cost column is non-increasing up to
/// [`tol::DESCENT_SLACK_REL`] for the step sizes used in the test scenarios.
pub fn continuous_lloyd_flow(
    region: &ConvexPolygon,
    phi: &DensityField,
    start: &Configuration,
    params: FlowParams,
) -> Result<FlowTrace, DescentError> {
    let mut trace = FlowTrace::new();
    let mut state = start.clone();
    let mut step = 0usize;
    loop {
        let eval = evaluate_state(region, phi, &state, params.k_prop)?;
        trace.push(
            step as f64 * params.step,
            state.clone(),
            eval.cost,
            eval.residual,
        );
        if eval.residual < params.tol || step >= params.max_steps {
            break;
        }

        // RK4 stages; each stage state rebuilds its own diagram
        let h = params.step;
        let v0 = eval.velocities;
        let s1 = advance(region, &state, &v0, 0.5 * h);
        let v1 = evaluate_state(region, phi, &s1, params.k_prop)?.velocities;
        let s2 = advance(region, &state, &v1, 0.5 * h);
        let v2 = evaluate_state(region, phi, &s2, params.k_prop)?.velocities;
        let s3 = advance(region, &state, &v2, h);
        let v3 = evaluate_state(region, phi, &s3, params.k_prop)?.velocities;

        let mut next = state.clone();
        for i in 0..state.len() {
            if eval.massless[i] {
                trace.zero_mass_holds.push((step, i));
            }
            let vel = (v0[i] + v1[i] * 2.0 + v2[i] * 2.0 + v3[i]) * (1.0 / 6.0);
            next.set_position(i, region.project(state.position(i) + vel * h));
        }
        state = next;
        step += 1;
    }
    Ok(trace)
}

fn advance(
    region: &ConvexPolygon,
    state: &Configuration,
    velocities: &[Vec2],
    dt: f64,
) -> Configuration {
    let mut next = state.clone();
    for i in 0..state.len() {
        next.set_position(i, region.project(state.position(i) + velocities[i] * dt));
    }
    next
}

struct FlowEval {
    velocities: Vec<Vec2>,
    massless: Vec<bool>,
    cost: CostBreakdown,
    residual: f64,
}

/// One diagram and one moments pass per state: centroid-seeking velocities,
/// the moment-route cost breakdown, and the residual.
fn evaluate_state(
    region: &ConvexPolygon,
    phi: &DensityField,
    state: &Configuration,
    k_prop: f64,
) -> Result<FlowEval, GeometryError> {
    let diagram = state.diagram(region)?;
    let n = state.len();
    let mut velocities = Vec::with_capacity(n);
    let mut massless = vec![false; n];
    let mut quantization = 0.0;
    let mut displacement = 0.0;
    let mut residual = 0.0f64;
    for (i, cell) in diagram.cells().iter().enumerate() {
        let p = state.position(i);
        match cell_moments(cell, phi.as_fn()) {
            Ok(m) => {
                let offset = m.centroid - p;
                quantization += m.polar_moment_centroid;
                displacement += m.mass * offset.norm_squared();
                residual = residual.max(offset.norm());
                velocities.push(offset * k_prop);
            }
            Err(GeometryError::ZeroMass(_)) => {
                // zero-mass cell: hold position this step
                massless[i] = true;
                velocities.push(Vec2::ZERO);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FlowEval {
        velocities,
        massless,
        cost: CostBreakdown {
            total: quantization + displacement,
            quantization: Some(quantization),
            displacement: Some(displacement),
        },
        residual,
    })
}

/// One application of the Lloyd map: every agent moves to the centroid of
/// its current cell. Fixed points are exactly the centroidal Voronoi
/// configurations; zero-mass agents hold position.
pub fn lloyd_map(
    region: &ConvexPolygon,
    phi: &DensityField,
    config: &Configuration,
) -> Result<Configuration, GeometryError> {
    let centroids = cell_centroids(region, phi, config)?;
    let mut next = config.clone();
    for (i, c) in centroids.iter().enumerate() {
        if let Some(c) = c {
            next.set_position(i, *c);
        }
    }
    Ok(next)
}

/// Iterate a configuration map under the admissibility monitor.
///
/// At every step the monitor asserts property (a) for all agents (distance
/// to the current cell centroid does not increase) and property (b) for at
/// least one agent while the configuration is not centroidal (some distance
/// strictly decreases). A violating map is reported with the offending agent
/// and iteration; it is not an admissible Lloyd variant.
pub fn descent_iterate<T>(
    region: &ConvexPolygon,
    phi: &DensityField,
    mut map: T,
    start: &Configuration,
    tol_residual: f64,
    max_iter: usize,
) -> Result<DescentReport, DescentError>
where
    T: FnMut(&Configuration) -> Result<Configuration, DescentError>,
{
    let mut state = start.clone();
    for iteration in 0..max_iter {
        let centroids = cell_centroids(region, phi, &state)?;
        let res = state
            .positions()
            .iter()
            .zip(&centroids)
            .map(|(&p, c)| c.map_or(0.0, |c| (p - c).norm()))
            .fold(0.0, f64::max);
        if res < tol_residual {
            return Ok(DescentReport {
                final_config: state,
                iterations: iteration,
                converged: true,
                residual: res,
            });
        }

        let next = map(&state)?;
        let mut some_strict = false;
        for (i, c) in centroids.iter().enumerate() {
            let Some(c) = *c else { continue };
            let before = (state.position(i) - c).norm();
            let after = (next.position(i) - c).norm();
            if after > before + tol::DESCENT_SLACK_REL * (1.0 + before) {
                return Err(DescentError::PropertyViolation {
                    agent: i,
                    iteration,
                    property: 'a',
                });
            }
            if after < before {
                some_strict = true;
            }
        }
        if !some_strict {
            // non-centroidal yet nobody strictly approached a centroid:
            // blame the agent farthest from its centroid
            let worst = centroids
                .iter()
                .enumerate()
                .max_by(|(i, a), (j, b)| {
                    let da = a.map_or(0.0, |c| (state.position(*i) - c).norm());
                    let db = b.map_or(0.0, |c| (state.position(*j) - c).norm());
                    da.total_cmp(&db)
                })
                .map(|(i, _)| i)
                .unwrap_or(0);
            return Err(DescentError::PropertyViolation {
                agent: worst,
                iteration,
                property: 'b',
            });
        }
        state = next;
    }
    let res = residual(region, phi, &state)?;
    Ok(DescentReport {
        final_config: state,
        iterations: max_iter,
        converged: res < tol_residual,
        residual: res,
    })
}

/// One parallel worst-case step: every agent moves to the center of the
/// minimum enclosing ball of its cell. No convergence guarantee is claimed.
pub fn p_center_step(
    region: &ConvexPolygon,
    config: &Configuration,
) -> Result<Configuration, GeometryError> {
    let diagram = config.diagram(region)?;
    let mut next = config.clone();
    for (i, cell) in diagram.cells().iter().enumerate() {
        next.set_position(i, min_enclosing_ball_center(cell)?);
    }
    Ok(next)
}
