//! Vehicle models beyond the single integrator: saturated first-order
//! motion, passive second-order dynamics under PD control, the unicycle
//! steering law, and synchronized local-controller rounds.

use std::f64::consts::PI;

use crate::density::DensityField;
use crate::geometry::{cell_moments, ConvexPolygon, GeometryError, Point2, Vec2};
use crate::objective::Configuration;
use crate::tol;

/// Errors from the vehicle layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    /// The supplied per-vehicle controller failed its strict-decrease
    /// contract over a round.
    #[error("vehicle {vehicle} did not strictly approach its target over the round")]
    ControllerContractViolation { vehicle: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// First-order integrator vehicle: position only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderState {
    pub p: Point2,
}

/// Double integrator vehicle: position and velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderState {
    pub p: Point2,
    pub v: Vec2,
}

/// Unicycle (mobile wheeled) vehicle. `dir` records the discrete symmetry
/// choice `(theta, v) -> (theta + pi, -v)`; flipping it leaves the position
/// trajectory unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicycleState {
    pub x: f64,
    pub y: f64,
    /// Heading in `(-pi, pi]`.
    pub theta: f64,
    /// Symmetry sign, +1 or -1.
    pub dir: i8,
}

impl UnicycleState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
            dir: 1,
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Any of the supported vehicle models, for heterogeneous collections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VehicleState {
    FirstOrder(FirstOrderState),
    SecondOrder(SecondOrderState),
    Unicycle(UnicycleState),
}

impl VehicleState {
    pub fn first_order(p: Point2) -> Self {
        VehicleState::FirstOrder(FirstOrderState { p })
    }

    pub fn position(&self) -> Point2 {
        match self {
            VehicleState::FirstOrder(s) => s.p,
            VehicleState::SecondOrder(s) => s.p,
            VehicleState::Unicycle(s) => s.position(),
        }
    }
}

/// Unit saturation: identity inside the unit disk, radial projection onto
/// it outside.
pub fn saturate(x: Vec2) -> Vec2 {
    let n = x.norm();
    if n <= 1.0 {
        x
    } else {
        x / n
    }
}

/// One first-order step `p <- p + h * SR(u)`, clamped to the region by
/// projection.
pub fn step_first_order(
    region: &ConvexPolygon,
    state: &FirstOrderState,
    u: Vec2,
    h: f64,
) -> FirstOrderState {
    FirstOrderState {
        p: region.project(state.p + saturate(u) * h),
    }
}

/// Proportional-derivative control for passive vehicles:
/// `u = -k_prop M_V (p - C_V) - k_deriv dp/dt`.
pub fn pd_control(
    state: &SecondOrderState,
    mass: f64,
    centroid: Point2,
    k_prop: f64,
    k_deriv: f64,
) -> Vec2 {
    (state.p - centroid) * (-k_prop * mass) - state.v * k_deriv
}

/// One RK4 step of the double integrator with `u` held constant. For this
/// linear system the stages collapse to the exact flow.
pub fn step_second_order(state: &SecondOrderState, u: Vec2, h: f64) -> SecondOrderState {
    let k1p = state.v;
    let k2p = state.v + u * (0.5 * h);
    let k3p = state.v + u * (0.5 * h);
    let k4p = state.v + u * h;
    SecondOrderState {
        p: state.p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0),
        v: state.v + u * h,
    }
}

/// Steering law for the unicycle toward a fixed target.
///
/// The heading representation is first normalized with the discrete flip
/// `(theta, v) -> (theta + pi, -v)` so that the body axis points no further
/// than perpendicular from the target; the returned state carries the flip.
/// Then
/// `omega = 2 k atan2(-e_perp, -e_par)` and `v = -k e_par`, where `e_par`
/// and `e_perp` are the components of `p - target` along the body axis and
/// its perpendicular. The two-argument angle keeps the quotient well defined
/// when the axis component vanishes; at the target both controls are zero.
pub fn unicycle_control(
    state: &UnicycleState,
    target: Point2,
    k_prop: f64,
) -> (f64, f64, UnicycleState) {
    let mut s = *state;
    let offset = s.position() - target;
    if offset.norm() < tol::SINGULARITY_SKIP {
        return (0.0, 0.0, s);
    }
    let axis = Vec2::new(s.theta.cos(), s.theta.sin());
    if axis.dot(offset) > 0.0 {
        s.theta = wrap_angle(s.theta + PI);
        s.dir = -s.dir;
    }
    let axis = Vec2::new(s.theta.cos(), s.theta.sin());
    let e_par = axis.dot(offset);
    let e_perp = axis.perp().dot(offset);
    let omega = 2.0 * k_prop * (-e_perp).atan2(-e_par);
    let v = -k_prop * e_par;
    (omega, v, s)
}

/// One RK4 step of the unicycle kinematics with `(omega, v)` held constant.
pub fn step_unicycle(state: &UnicycleState, omega: f64, v: f64, h: f64) -> UnicycleState {
    let f = |theta: f64| (v * theta.cos(), v * theta.sin());
    let th = state.theta;
    let (k1x, k1y) = f(th);
    let (k2x, k2y) = f(th + 0.5 * h * omega);
    let (k3x, k3y) = f(th + 0.5 * h * omega);
    let (k4x, k4y) = f(th + h * omega);
    UnicycleState {
        x: state.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y: state.y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        theta: wrap_angle(th + h * omega),
        dir: state.dir,
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Lyapunov bookkeeping for the PD closed loop:
/// `E = (k_prop / 2) H_V + sum_i 1/2 ||v_i||^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub total: f64,
    pub kinetic: f64,
    pub coverage: f64,
}

impl EnergyRecord {
    pub fn new(k_prop: f64, coverage: f64, velocities: impl Iterator<Item = Vec2>) -> Self {
        let kinetic: f64 = velocities.map(|v| 0.5 * v.norm_squared()).sum();
        Self {
            total: 0.5 * k_prop * coverage + kinetic,
            kinetic,
            coverage,
        }
    }
}

/// PD gains for the passive closed loop.
#[derive(Debug, Clone, Copy)]
pub struct PdGains {
    pub k_prop: f64,
    pub k_deriv: f64,
}

/// Trace of the PD closed loop.
#[derive(Debug, Clone)]
pub struct PdTrace {
    pub times: Vec<f64>,
    pub states: Vec<Vec<SecondOrderState>>,
    pub energy: Vec<EnergyRecord>,
    pub residuals: Vec<f64>,
}

impl PdTrace {
    /// First index where the energy rose beyond [`tol::ENERGY_SLACK`].
    pub fn first_energy_ascent(&self) -> Option<usize> {
        self.energy
            .windows(2)
            .position(|w| w[1].total > w[0].total + tol::ENERGY_SLACK)
    }
}

/// Run the PD-controlled double-integrator fleet until the coverage residual
/// drops below `tol_residual` or `max_steps` elapse. Cells that carry no
/// density mass leave their vehicle with pure damping for that step.
pub fn pd_closed_loop(
    region: &ConvexPolygon,
    phi: &DensityField,
    start: &[SecondOrderState],
    gains: PdGains,
    h: f64,
    max_steps: usize,
    tol_residual: f64,
) -> Result<PdTrace, DynamicsError> {
    let mut states = start.to_vec();
    let mut trace = PdTrace {
        times: Vec::new(),
        states: Vec::new(),
        energy: Vec::new(),
        residuals: Vec::new(),
    };
    for step in 0..=max_steps {
        let config = Configuration::new(states.iter().map(|s| s.p).collect());
        let diagram = config.diagram(region)?;
        let mut coverage = 0.0;
        let mut residual = 0.0f64;
        let mut controls = Vec::with_capacity(states.len());
        for (i, cell) in diagram.cells().iter().enumerate() {
            match cell_moments(cell, phi.as_fn()) {
                Ok(m) => {
                    let d2 = (states[i].p - m.centroid).norm_squared();
                    coverage += m.polar_moment_centroid + m.mass * d2;
                    residual = residual.max(d2.sqrt());
                    controls.push(pd_control(
                        &states[i],
                        m.mass,
                        m.centroid,
                        gains.k_prop,
                        gains.k_deriv,
                    ));
                }
                Err(GeometryError::ZeroMass(_)) => {
                    controls.push(states[i].v * -gains.k_deriv);
                }
                Err(e) => return Err(e.into()),
            }
        }
        trace.times.push(step as f64 * h);
        trace.states.push(states.clone());
        trace.energy.push(EnergyRecord::new(
            gains.k_prop,
            coverage,
            states.iter().map(|s| s.v),
        ));
        trace.residuals.push(residual);
        if residual < tol_residual || step == max_steps {
            break;
        }
        for (s, &u) in states.iter_mut().zip(&controls) {
            let mut next = step_second_order(s, u, h);
            next.p = region.project(next.p);
            *s = next;
        }
    }
    Ok(trace)
}

/// A per-vehicle controller that can advance its vehicle toward a fixed
/// target. Implementations must strictly decrease the distance to the target
/// over a round unless the vehicle already sits on it; the round runner
/// checks the contract.
pub trait LocalController {
    fn advance(
        &self,
        state: &VehicleState,
        target: Point2,
        region: &ConvexPolygon,
        h: f64,
    ) -> VehicleState;
}

/// Saturated first-order controller that never overshoots its target.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderSeek;

impl LocalController for FirstOrderSeek {
    fn advance(
        &self,
        state: &VehicleState,
        target: Point2,
        region: &ConvexPolygon,
        h: f64,
    ) -> VehicleState {
        let p = state.position();
        let to_target = target - p;
        let dist = to_target.norm();
        if dist == 0.0 {
            return *state;
        }
        let travel = (saturate(to_target).norm() * h).min(dist);
        VehicleState::first_order(region.project(p + to_target * (travel / dist)))
    }
}

/// Unicycle go-to-goal controller built on [`unicycle_control`].
#[derive(Debug, Clone, Copy)]
pub struct UnicycleSeek {
    pub k_prop: f64,
}

impl LocalController for UnicycleSeek {
    fn advance(
        &self,
        state: &VehicleState,
        target: Point2,
        _region: &ConvexPolygon,
        h: f64,
    ) -> VehicleState {
        let VehicleState::Unicycle(s) = state else {
            return *state;
        };
        let (omega, v, flipped) = unicycle_control(s, target, self.k_prop);
        VehicleState::Unicycle(step_unicycle(&flipped, omega, v, h))
    }
}

/// One synchronized round: the diagram is computed once at round start, the
/// centroid targets stay fixed, and every vehicle integrates for `delta` in
/// substeps of at most `h`. Vehicles whose cells carry no mass keep their
/// position as target and are exempt from the decrease check, as are
/// vehicles already at their target.
pub fn local_controller_round(
    region: &ConvexPolygon,
    phi: &DensityField,
    states: &[VehicleState],
    delta: f64,
    h: f64,
    controller: &dyn LocalController,
) -> Result<Vec<VehicleState>, DynamicsError> {
    let config = Configuration::new(states.iter().map(|s| s.position()).collect());
    let diagram = config.diagram(region)?;
    let mut targets = Vec::with_capacity(states.len());
    for (i, cell) in diagram.cells().iter().enumerate() {
        match cell_moments(cell, phi.as_fn()) {
            Ok(m) => targets.push(m.centroid),
            Err(GeometryError::ZeroMass(_)) => targets.push(states[i].position()),
            Err(e) => return Err(e.into()),
        }
    }

    let substeps = (delta / h).ceil().max(1.0) as usize;
    let dt = delta / substeps as f64;
    let mut out = Vec::with_capacity(states.len());
    for (i, (state, &target)) in states.iter().zip(&targets).enumerate() {
        let before = (state.position() - target).norm();
        let mut s = *state;
        for _ in 0..substeps {
            s = controller.advance(&s, target, region, dt);
        }
        let after = (s.position() - target).norm();
        if before > tol::SINGULARITY_SKIP && after >= before {
            return Err(DynamicsError::ControllerContractViolation { vehicle: i });
        }
        out.push(s);
    }
    Ok(out)
}
