//! The discrete-event engine and the two asynchronous coverage behaviors.
//!
//! Behavior `GradientSteps` (communication-capable agents): at every wake an
//! agent runs an information thread (the communication-radius protocol that
//! keeps its cell current) and/or a control thread (one saturated gradient
//! step of duration `delta0` toward the mass-weighted centroid of its stored
//! cell), with a fairness bound forcing each thread at least once every
//! `B_i` wakes.
//!
//! Behavior `MonitoredSeek` (sensing-capable agents): at every wake an agent
//! recomputes its cell by growing its sensing radius, then moves toward the
//! cell centroid for a window shorter than its minimum wake gap, stopping at
//! the centroid. Monitoring ticks during the window watch the other agents'
//! weights; a weight jump of at least 2 raises a recomputation request that
//! refreshes the cell, the centroid, and the velocity mid-window.
//!
//! All randomness (wake gaps, thread choices, delivery jitter) flows from
//! one seeded stream drawn in event order, so a run is a pure function of
//! scenario and seed. Simultaneous events order by `(time, agent, seq)`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    adjust_sensing_radius, candidate_cell, neighbors_of_cell, weight_map, DistributedError,
    SimRecord, SimTrace, ViewEntry,
};
use crate::density::DensityField;
use crate::dynamics::saturate;
use crate::geometry::{cell_moments, ConvexPolygon, GeometryError, Point2, Vec2};
use crate::objective::{Configuration, CostBreakdown};
use crate::tol;

/// Margin keeping round-completion events strictly after the replies of
/// their own round, including at zero latency.
const ROUND_MARGIN: f64 = 1e-9;

/// Which coverage behavior the network executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BehaviorMode {
    /// Asynchronous gradient steps with communication-maintained cells.
    GradientSteps,
    /// Continuous centroid seeking with sensing and monitoring interrupts.
    MonitoredSeek,
}

/// Per-agent scenario parameters.
#[derive(Debug, Clone, Copy)]
pub struct AgentSetup {
    pub position: Point2,
    /// Local clock speed relative to global time.
    pub clock_rate: f64,
    /// Bounds on consecutive wake gaps, in local clock time.
    pub gap_min: f64,
    pub gap_max: f64,
    /// Fairness bound `B`: each behavior thread runs at least once within
    /// any `B` consecutive wakes.
    pub fairness_bound: usize,
    pub initial_radius: f64,
}

impl AgentSetup {
    pub fn at(position: Point2) -> Self {
        Self {
            position,
            clock_rate: 1.0,
            gap_min: 0.08,
            gap_max: 0.12,
            fairness_bound: 3,
            initial_radius: 0.2,
        }
    }
}

/// Network-wide simulation parameters.
#[derive(Debug, Clone, Copy)]
pub struct NetworkConfig {
    /// Fixed message delivery delay.
    pub latency: f64,
    /// Extra seeded, uniformly drawn delivery delay in `[0, jitter]`.
    pub jitter: f64,
    /// View entries older than the round wake time by more than this are
    /// evicted and re-queried.
    pub staleness_budget: f64,
    /// Duration of one gradient control step.
    pub delta0: f64,
    /// Motion window of a seek wake, as a fraction (< 1) of the agent's
    /// minimum wake gap.
    pub motion_fraction: f64,
    /// Monitoring passes per motion window.
    pub monitor_ticks: usize,
    pub seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            latency: 0.0,
            jitter: 0.0,
            staleness_budget: 0.5,
            delta0: 0.05,
            motion_fraction: 0.9,
            monitor_ticks: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
enum EventKind {
    Wake,
    RequestToReply {
        from: usize,
        position: Point2,
    },
    Response {
        from: usize,
        position: Point2,
        sampled_at: f64,
    },
    RoundComplete {
        round: u64,
    },
    MonitorTick,
    MotionStop,
}

#[derive(Debug, Clone)]
struct Event {
    time: f64,
    dest: usize,
    seq: u64,
    kind: EventKind,
}

/// Heap ordering key: `(time, dest agent, sequence number)`.
struct QueueEntry(Event);

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .time
            .total_cmp(&other.0.time)
            .then(self.0.dest.cmp(&other.0.dest))
            .then(self.0.seq.cmp(&other.0.seq))
    }
}

#[derive(Debug, Clone)]
struct RoundState {
    id: u64,
    wake_time: f64,
    /// Position at the wake the round serves; the radius loop evaluates
    /// against this snapshot so concurrent own motion cannot destabilize
    /// the termination test.
    anchor: Point2,
    iterations: usize,
}

struct AgentCore {
    setup: AgentSetup,
    // piecewise-constant velocity motion
    base_pos: Point2,
    base_time: f64,
    vel: Vec2,
    vel_until: f64,
    radius: f64,
    view: Vec<Option<ViewEntry>>,
    weights: Vec<u8>,
    cell: Option<ConvexPolygon>,
    round: Option<RoundState>,
    wakes_since_info: usize,
    wakes_since_control: usize,
    window_end: f64,
}

impl AgentCore {
    fn new(setup: AgentSetup, n: usize) -> Self {
        Self {
            setup,
            base_pos: setup.position,
            base_time: 0.0,
            vel: Vec2::ZERO,
            vel_until: 0.0,
            radius: setup.initial_radius,
            view: vec![None; n],
            weights: vec![0; n],
            cell: None,
            round: None,
            wakes_since_info: 0,
            wakes_since_control: 0,
            window_end: 0.0,
        }
    }

    fn position_at(&self, t: f64) -> Point2 {
        let dt = t.min(self.vel_until).max(self.base_time) - self.base_time;
        self.base_pos + self.vel * dt
    }

    fn speed_at(&self, t: f64) -> f64 {
        if t >= self.base_time && t < self.vel_until {
            self.vel.norm()
        } else {
            0.0
        }
    }

    fn set_velocity(&mut self, t: f64, vel: Vec2, until: f64) {
        self.base_pos = self.position_at(t);
        self.base_time = t;
        self.vel = vel;
        self.vel_until = until;
    }
}

/// A network of asynchronous agents inside a convex environment.
///
/// Built once per run; [`NetworkSim::run`] consumes the network so that a
/// deterministic replay is a fresh construction from the same inputs.
pub struct NetworkSim {
    region: ConvexPolygon,
    phi: DensityField,
    cfg: NetworkConfig,
    mode: BehaviorMode,
    agents: Vec<AgentCore>,
    queue: BinaryHeap<Reverse<QueueEntry>>,
    time: f64,
    seq: u64,
    round_counter: u64,
    rng: ChaCha8Rng,
    trace: SimTrace,
    cost_cache: Option<(u64, CostBreakdown, f64)>,
}

impl NetworkSim {
    pub fn new(
        region: ConvexPolygon,
        phi: DensityField,
        setups: Vec<AgentSetup>,
        cfg: NetworkConfig,
    ) -> Self {
        let n = setups.len();
        assert!(n >= 1, "a network holds at least one agent");
        for s in &setups {
            assert!(s.clock_rate > 0.0 && s.gap_min > 0.0 && s.gap_max > s.gap_min);
            assert!(s.fairness_bound >= 1 && s.initial_radius > 0.0);
        }
        assert!(cfg.motion_fraction > 0.0 && cfg.motion_fraction < 1.0);
        assert!(cfg.monitor_ticks >= 1);
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Self {
            region,
            phi,
            cfg,
            mode: BehaviorMode::MonitoredSeek,
            agents: setups.into_iter().map(|s| AgentCore::new(s, n)).collect(),
            queue: BinaryHeap::new(),
            time: 0.0,
            seq: 0,
            round_counter: 0,
            rng,
            trace: SimTrace::default(),
            cost_cache: None,
        }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agent_cell(&self, i: usize) -> Option<&ConvexPolygon> {
        self.agents[i].cell.as_ref()
    }

    pub fn agent_radius(&self, i: usize) -> f64 {
        self.agents[i].radius
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.agents
            .iter()
            .map(|a| a.position_at(self.time))
            .collect()
    }

    /// Execute a behavior until `horizon` (global time). The trace holds one
    /// record per processed event plus the initial and horizon rows.
    pub fn run(mut self, mode: BehaviorMode, horizon: f64) -> Result<SimTrace, DistributedError> {
        self.mode = mode;
        self.synchronized_init();
        self.record_row("init".into())?;
        for i in 0..self.agents.len() {
            let gap = self.draw_gap(i);
            self.push(gap, i, EventKind::Wake);
        }
        while let Some(event) = self.pop_due(horizon) {
            self.time = event.time;
            let annotation = self.dispatch(event)?;
            self.record_row(annotation)?;
        }
        self.time = horizon;
        self.record_row("horizon".into())?;
        Ok(self.trace)
    }

    /// The communication-radius protocol for one agent, run to completion on
    /// an otherwise idle network: request/response rounds grow the radius
    /// until it covers twice the farthest candidate-cell vertex. Returns the
    /// final radius and cell. Replies execute as the other agents'
    /// event-driven tasks.
    pub fn adjust_communication_radius(
        &mut self,
        agent: usize,
    ) -> Result<(f64, ConvexPolygon), DistributedError> {
        self.start_round(agent);
        while self.agents[agent].round.is_some() {
            let event = self
                .queue
                .pop()
                .map(|Reverse(QueueEntry(e))| e)
                .expect("round in flight implies pending events");
            self.time = self.time.max(event.time);
            self.dispatch(event)?;
        }
        let core = &self.agents[agent];
        Ok((core.radius, core.cell.clone().expect("round just completed")))
    }

    /// At time zero all clocks are synchronized and every agent knows the
    /// exact location of every other agent; each computes its cell from the
    /// full view and sets its radius to twice the farthest cell vertex.
    fn synchronized_init(&mut self) {
        let n = self.agents.len();
        let positions: Vec<Point2> = self.agents.iter().map(|a| a.setup.position).collect();
        let big = 4.0 * self.region.diameter().max(1.0);
        for i in 0..n {
            let view: Vec<Point2> = positions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p)
                .collect();
            let cell = candidate_cell(positions[i], big, &view, &self.region);
            let radius = 2.0 * cell.max_vertex_distance(positions[i]);
            let core = &mut self.agents[i];
            core.radius = radius;
            core.cell = Some(cell);
            for (j, &p) in positions.iter().enumerate() {
                core.view[j] = Some(ViewEntry {
                    position: p,
                    freshness: 0.0,
                });
            }
            core.view[i] = None;
        }
        // initial weights from the initial cells; nobody is active yet
        let active = vec![false; n];
        for i in 0..n {
            let cell = self.agents[i].cell.clone().unwrap();
            let others: Vec<(usize, Point2)> = positions
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, &p)| (j, p))
                .collect();
            let neighbors = neighbors_of_cell(&cell, positions[i], &others);
            self.agents[i].weights = weight_map(n, &neighbors, &active);
        }
    }

    fn draw_gap(&mut self, i: usize) -> f64 {
        let s = self.agents[i].setup;
        self.rng.gen_range(s.gap_min..s.gap_max) / s.clock_rate
    }

    fn push(&mut self, delay: f64, dest: usize, kind: EventKind) {
        let event = Event {
            time: self.time + delay,
            dest,
            seq: self.seq,
            kind,
        };
        self.seq += 1;
        self.queue.push(Reverse(QueueEntry(event)));
    }

    fn pop_due(&mut self, horizon: f64) -> Option<Event> {
        let due = self
            .queue
            .peek()
            .is_some_and(|Reverse(QueueEntry(e))| e.time <= horizon);
        if due {
            self.queue.pop().map(|Reverse(QueueEntry(e))| e)
        } else {
            None
        }
    }

    fn dispatch(&mut self, event: Event) -> Result<String, DistributedError> {
        let i = event.dest;
        match event.kind {
            EventKind::Wake => self.on_wake(i),
            EventKind::RequestToReply { from, position } => Ok(self.on_request(i, from, position)),
            EventKind::Response {
                from,
                position,
                sampled_at,
            } => {
                self.agents[i].view[from] = Some(ViewEntry {
                    position,
                    freshness: sampled_at,
                });
                Ok(format!("response:{from}->{i}"))
            }
            EventKind::RoundComplete { round } => self.on_round_complete(i, round),
            EventKind::MonitorTick => self.on_monitor_tick(i),
            EventKind::MotionStop => {
                let core = &mut self.agents[i];
                if self.time >= core.vel_until {
                    core.set_velocity(self.time, Vec2::ZERO, self.time);
                }
                Ok(format!("stop:{i}"))
            }
        }
    }

    fn on_wake(&mut self, i: usize) -> Result<String, DistributedError> {
        let gap = self.draw_gap(i);
        self.push(gap, i, EventKind::Wake);
        match self.mode {
            BehaviorMode::GradientSteps => self.gradient_wake(i),
            BehaviorMode::MonitoredSeek => self.seek_wake(i),
        }
    }

    // --- gradient behavior (communication) ---

    fn gradient_wake(&mut self, i: usize) -> Result<String, DistributedError> {
        let bound = self.agents[i].setup.fairness_bound;
        let mut do_info = self.agents[i].wakes_since_info + 1 >= bound;
        let mut do_control = self.agents[i].wakes_since_control + 1 >= bound;
        if !do_info && !do_control {
            match self.rng.gen_range(0..3u8) {
                0 => do_info = true,
                1 => do_control = true,
                _ => {
                    do_info = true;
                    do_control = true;
                }
            }
        }
        {
            let core = &mut self.agents[i];
            core.wakes_since_info = if do_info { 0 } else { core.wakes_since_info + 1 };
            core.wakes_since_control = if do_control {
                0
            } else {
                core.wakes_since_control + 1
            };
            if core.wakes_since_info > bound {
                return Err(DistributedError::FairnessViolation {
                    agent: i,
                    thread: "information",
                });
            }
            if core.wakes_since_control > bound {
                return Err(DistributedError::FairnessViolation {
                    agent: i,
                    thread: "control",
                });
            }
        }

        let mut note = format!("wake:{i}");
        if do_info && self.agents[i].round.is_none() {
            self.start_round(i);
            note.push_str("+info");
        }
        if do_control {
            let cell = self.agents[i].cell.clone().expect("initialized at time 0");
            let t = self.time;
            let p = self.agents[i].position_at(t);
            match cell_moments(&cell, self.phi.as_fn()) {
                Ok(m) => {
                    let u = saturate((m.centroid - p) * m.mass);
                    let until = t + self.cfg.delta0;
                    self.agents[i].set_velocity(t, u, until);
                    self.push(self.cfg.delta0, i, EventKind::MotionStop);
                    note.push_str("+control");
                }
                Err(GeometryError::ZeroMass(_)) => {
                    self.agents[i].set_velocity(t, Vec2::ZERO, t);
                    note.push_str("+control(zero-mass hold)");
                }
                Err(e) => return Err(e.into()),
            }
        }
        Ok(note)
    }

    fn start_round(&mut self, i: usize) {
        let id = self.round_counter;
        self.round_counter += 1;
        let t = self.time;
        // a re-query keeps the original wake's time and position anchor
        let (wake_time, anchor, iterations) = match &self.agents[i].round {
            Some(r) => (r.wake_time, r.anchor, r.iterations),
            None => (t, self.agents[i].position_at(t), 0),
        };
        self.agents[i].round = Some(RoundState {
            id,
            wake_time,
            anchor,
            iterations,
        });
        let radius = self.agents[i].radius;
        let recipients: Vec<usize> = (0..self.agents.len())
            .filter(|&j| j != i && self.agents[j].position_at(t).distance(anchor) <= radius)
            .collect();
        for j in recipients {
            let delay = self.delivery_delay();
            self.push(
                delay,
                j,
                EventKind::RequestToReply {
                    from: i,
                    position: anchor,
                },
            );
        }
        let bound = 2.0 * (self.cfg.latency + self.cfg.jitter) + ROUND_MARGIN;
        self.push(bound, i, EventKind::RoundComplete { round: id });
    }

    fn delivery_delay(&mut self) -> f64 {
        if self.cfg.jitter > 0.0 {
            self.cfg.latency + self.rng.gen_range(0.0..self.cfg.jitter)
        } else {
            self.cfg.latency
        }
    }

    fn on_request(&mut self, j: usize, from: usize, requester_pos: Point2) -> String {
        // event-driven reply: send the own position back within the radius
        // that exactly reaches the requester
        let t = self.time;
        let p = self.agents[j].position_at(t);
        let _reply_radius = p.distance(requester_pos);
        let delay = self.delivery_delay();
        self.push(
            delay,
            from,
            EventKind::Response {
                from: j,
                position: p,
                sampled_at: t,
            },
        );
        format!("request:{from}->{j}")
    }

    fn on_round_complete(&mut self, i: usize, round: u64) -> Result<String, DistributedError> {
        let Some(state) = self.agents[i].round.clone() else {
            return Ok(format!("round-obsolete:{i}"));
        };
        if state.id != round {
            return Ok(format!("round-obsolete:{i}"));
        }

        // evict entries staler than the wake this round serves
        let stale_before = state.wake_time - self.cfg.staleness_budget;
        let mut evicted = false;
        for j in 0..self.agents.len() {
            if j == i {
                continue;
            }
            if let Some(entry) = self.agents[i].view[j] {
                if entry.freshness < stale_before {
                    self.agents[i].view[j] = None;
                    evicted = true;
                }
            }
        }

        let p = state.anchor;
        let radius = self.agents[i].radius;
        let view: Vec<Point2> = self.agents[i]
            .view
            .iter()
            .flatten()
            .map(|e| e.position)
            .collect();
        let cell = candidate_cell(p, radius, &view, &self.region);
        let needed = 2.0 * cell.max_vertex_distance(p);

        if evicted || radius < needed * (1.0 - tol::EQUIDISTANT_REL) {
            let iterations = state.iterations + 1;
            if iterations > tol::MAX_RADIUS_ITERATIONS {
                return Err(DistributedError::NonTermination { agent: i });
            }
            self.agents[i].radius = radius.max(needed);
            self.agents[i].round = Some(RoundState {
                iterations,
                ..state
            });
            self.start_round(i);
            Ok(if evicted {
                format!("round-requery:{i}(stale-view)")
            } else {
                format!("round-grow:{i}")
            })
        } else {
            self.agents[i].radius = needed;
            self.agents[i].cell = Some(cell);
            self.agents[i].round = None;
            Ok(format!("round-done:{i}"))
        }
    }

    // --- monitored seek behavior (sensing) ---

    fn seek_wake(&mut self, i: usize) -> Result<String, DistributedError> {
        let t = self.time;
        self.refresh_cell_and_weights(i)?;
        let setup = self.agents[i].setup;
        let window = self.cfg.motion_fraction * setup.gap_min / setup.clock_rate;
        self.agents[i].window_end = t + window;
        let note = self.command_seek(i)?;
        for k in 1..=self.cfg.monitor_ticks {
            let dt = window * k as f64 / self.cfg.monitor_ticks as f64;
            self.push(dt, i, EventKind::MonitorTick);
        }
        Ok(format!("wake:{i}{note}"))
    }

    /// Sense, rebuild the cell, and recompute the stored weights.
    /// Returns true when some weight jumped by at least 2.
    fn refresh_cell_and_weights(&mut self, i: usize) -> Result<bool, DistributedError> {
        let t = self.time;
        let n = self.agents.len();
        let snapshot: Vec<Point2> = self.agents.iter().map(|a| a.position_at(t)).collect();
        let (radius, cell) = adjust_sensing_radius(
            &self.region,
            i,
            snapshot[i],
            self.agents[i].radius,
            &snapshot,
        )?;
        // sensing also refreshes the view entries within range
        for (j, &p) in snapshot.iter().enumerate() {
            if j != i && snapshot[i].distance(p) <= radius {
                self.agents[i].view[j] = Some(ViewEntry {
                    position: p,
                    freshness: t,
                });
            }
        }
        let others: Vec<(usize, Point2)> = snapshot
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, &p)| (j, p))
            .collect();
        let neighbors = neighbors_of_cell(&cell, snapshot[i], &others);
        let active: Vec<bool> = (0..n)
            .map(|j| self.agents[j].speed_at(t) > tol::ACTIVE_SPEED)
            .collect();
        let weights = weight_map(n, &neighbors, &active);
        let jumped = weights
            .iter()
            .zip(&self.agents[i].weights)
            .any(|(&new, &old)| new >= old + 2);
        self.agents[i].radius = radius;
        self.agents[i].cell = Some(cell);
        self.agents[i].weights = weights;
        Ok(jumped)
    }

    /// Aim at the centroid of the stored cell and move until reaching it or
    /// the window end, whichever is first.
    fn command_seek(&mut self, i: usize) -> Result<String, DistributedError> {
        let t = self.time;
        let cell = self.agents[i].cell.clone().expect("cell refreshed");
        let p = self.agents[i].position_at(t);
        match cell_moments(&cell, self.phi.as_fn()) {
            Ok(m) => {
                let offset = m.centroid - p;
                let dist = offset.norm();
                if dist < tol::SINGULARITY_SKIP {
                    self.agents[i].set_velocity(t, Vec2::ZERO, t);
                    return Ok(String::new());
                }
                let u = saturate(offset);
                let time_to_target = dist / u.norm();
                let stop = (t + time_to_target).min(self.agents[i].window_end);
                self.agents[i].set_velocity(t, u, stop);
                self.push(stop - t, i, EventKind::MotionStop);
                Ok(String::new())
            }
            Err(GeometryError::ZeroMass(_)) => {
                self.agents[i].set_velocity(t, Vec2::ZERO, t);
                Ok("(zero-mass hold)".into())
            }
            Err(e) => Err(e.into()),
        }
    }

    fn on_monitor_tick(&mut self, i: usize) -> Result<String, DistributedError> {
        if self.time > self.agents[i].window_end + ROUND_MARGIN {
            return Ok(format!("tick-expired:{i}"));
        }
        let warned = self.refresh_cell_and_weights(i)?;
        if warned {
            // the recomputation request interrupts the motion: new centroid,
            // new velocity for the remaining window
            let note = self.command_seek(i)?;
            Ok(format!("recompute:{i}{note}"))
        } else {
            Ok(format!("tick:{i}"))
        }
    }

    // --- tracing ---

    fn record_row(&mut self, annotation: String) -> Result<(), DistributedError> {
        let t = self.time;
        let positions: Vec<Point2> = self.agents.iter().map(|a| a.position_at(t)).collect();
        let (cost, residual) = self.global_cost(&positions)?;
        self.trace.records.push(SimRecord {
            time: t,
            positions,
            cost,
            residual,
            annotation,
        });
        Ok(())
    }

    /// Centralized cost and residual of the true configuration, cached per
    /// timestamp (positions cannot change within one timestamp: velocity
    /// updates only affect later times).
    fn global_cost(
        &mut self,
        positions: &[Point2],
    ) -> Result<(CostBreakdown, f64), DistributedError> {
        let key = self.time.to_bits();
        if let Some((k, c, r)) = self.cost_cache {
            if k == key {
                return Ok((c, r));
            }
        }
        let config = Configuration::new(positions.to_vec());
        let (cost, residual) =
            crate::objective::quadratic_cost_residual(&self.region, &self.phi, &config)?;
        self.cost_cache = Some((key, cost, residual));
        Ok((cost, residual))
    }
}
