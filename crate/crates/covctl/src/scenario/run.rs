//! Dispatch a parsed scenario onto the algorithm implementations and
//! collect a uniform trajectory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, Placement, ScenarioConfig, ScenarioError, TrajectoryRecord};
use crate::descent::{continuous_lloyd_flow, lloyd_map, p_center_step, FlowParams};
use crate::distributed::{AgentSetup, BehaviorMode, NetworkConfig, NetworkSim};
use crate::dynamics::local_controller_round;
use crate::dynamics::{
    pd_closed_loop, FirstOrderSeek, PdGains, UnicycleSeek, UnicycleState, VehicleState,
};
use crate::geometry::Point2;
use crate::objective::{p_center_cost, quadratic_cost_residual, Configuration};

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    pub summary: RunSummary,
}

/// Terminal summary of a run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub converged: bool,
    pub residual: f64,
    pub final_cost: f64,
    pub steps: usize,
    /// Free-form notes (zero-mass holds, divergence warnings).
    pub notes: Vec<String>,
}

fn run_err(algorithm: Algorithm, e: impl std::error::Error + Send + Sync + 'static) -> ScenarioError {
    ScenarioError::Run {
        algorithm: algorithm.name().to_string(),
        source: Box::new(e),
    }
}

/// Resolve the initial positions: explicit lists get a seeded 1e-9
/// perturbation as a tie-breaker against degenerate bisector geometry;
/// random placement rejection-samples the environment uniformly.
pub fn initial_positions(cfg: &ScenarioConfig) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match &cfg.placement {
        Placement::Explicit(ps) => ps
            .iter()
            .map(|p| {
                let dx = (rng.gen::<f64>() - 0.5) * 2e-9;
                let dy = (rng.gen::<f64>() - 0.5) * 2e-9;
                cfg.polygon.project(Point2::new(p.x + dx, p.y + dy))
            })
            .collect(),
        Placement::Random => {
            let (lo, hi) = cfg.polygon.bounding_box();
            let mut out = Vec::with_capacity(cfg.n);
            while out.len() < cfg.n {
                let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
                if cfg.polygon.contains(p) {
                    out.push(p);
                }
            }
            out
        }
    }
}

/// Run a scenario to completion. Deterministic for a fixed config and seed.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, ScenarioError> {
    match cfg.algorithm {
        Algorithm::LloydContinuous => run_flow(cfg),
        Algorithm::LloydMap => run_lloyd_map(cfg),
        Algorithm::PCenter => run_p_center(cfg),
        Algorithm::Pd => run_pd(cfg),
        Algorithm::Unicycle => run_rounds(cfg, true),
        Algorithm::LocalRounds => run_rounds(cfg, false),
        Algorithm::DistI => run_distributed(cfg, BehaviorMode::GradientSteps),
        Algorithm::DistII => run_distributed(cfg, BehaviorMode::MonitoredSeek),
    }
}

fn run_flow(cfg: &ScenarioConfig) -> Result<RunOutput, ScenarioError> {
    let start = Configuration::new(initial_positions(cfg));
    let params = FlowParams {
        k_prop: cfg.k_prop,
        step: cfg.h,
        max_steps: cfg.horizon as usize,
        tol: cfg.tol,
    };
    let trace = continuous_lloyd_flow(&cfg.polygon, &cfg.density, &start, params)
        .map_err(|e| run_err(cfg.algorithm, e))?;
    let records: Vec<TrajectoryRecord> = (0..trace.len())
        .map(|k| TrajectoryRecord {
            time: trace.times[k],
            positions: trace.states[k].positions().to_vec(),
            headings: None,
            cost: trace.costs[k],
            residual: trace.residuals[k],
            annotation: format!("step:{k}"),
        })
        .collect();
    let mut notes: Vec<String> = trace
        .zero_mass_holds
        .iter()
        .map(|(step, agent)| format!("zero-mass hold: agent {agent} at step {step}"))
        .collect();
    notes.dedup();
    let residual = *trace.residuals.last().unwrap();
    Ok(RunOutput {
        summary: RunSummary {
            algorithm: cfg.algorithm,
            converged: residual < cfg.tol,
            residual,
            final_cost: trace.costs.last().unwrap().total,
            steps: trace.len() - 1,
            notes,
        },
        records,
    })
}

fn run_lloyd_map(cfg: &ScenarioConfig) -> Result<RunOutput, ScenarioError> {
    let mut state = Configuration::new(initial_positions(cfg));
    let mut records = Vec::new();
    let max_steps = cfg.horizon as usize;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let mut final_cost = f64::NAN;
    let mut steps = 0;
    for step in 0..=max_steps {
        let (cost, res) = quadratic_cost_residual(&cfg.polygon, &cfg.density, &state)
            .map_err(|e| run_err(cfg.algorithm, e))?;
        records.push(TrajectoryRecord {
            time: step as f64,
            positions: state.positions().to_vec(),
            headings: None,
            cost,
            residual: res,
            annotation: format!("iter:{step}"),
        });
        residual = res;
        final_cost = cost.total;
        steps = step;
        if res < cfg.tol {
            converged = true;
            break;
        }
        if step == max_steps {
            break;
        }
        state = lloyd_map(&cfg.polygon, &cfg.density, &state)
            .map_err(|e| run_err(cfg.algorithm, e))?;
    }
    Ok(RunOutput {
        records,
        summary: RunSummary {
            algorithm: cfg.algorithm,
            converged,
            residual,
            final_cost,
            steps,
            notes: Vec::new(),
        },
    })
}

fn run_p_center(cfg: &ScenarioConfig) -> Result<RunOutput, ScenarioError> {
    let mut state = Configuration::new(initial_positions(cfg));
    let mut records = Vec::new();
    let max_steps = cfg.horizon as usize;
    let mut previous = f64::INFINITY;
    let mut converged = false;
    let mut steps = 0;
    for step in 0..=max_steps {
        let (cost, res) = quadratic_cost_residual(&cfg.polygon, &cfg.density, &state)
            .map_err(|e| run_err(cfg.algorithm, e))?;
        let pc = p_center_cost(&cfg.polygon, &state).map_err(|e| run_err(cfg.algorithm, e))?;
        records.push(TrajectoryRecord {
            time: step as f64,
            positions: state.positions().to_vec(),
            headings: None,
            cost,
            residual: res,
            annotation: format!("pcenter-cost:{pc:.16e}"),
        });
        steps = step;
        // fixed point of the enclosing-ball step: the movement stalls
        if (previous - pc).abs() < cfg.tol {
            converged = true;
            break;
        }
        previous = pc;
        if step == max_steps {
            break;
        }
        state = p_center_step(&cfg.polygon, &state).map_err(|e| run_err(cfg.algorithm, e))?;
    }
    let last = records.last().unwrap();
    Ok(RunOutput {
        summary: RunSummary {
            algorithm: cfg.algorithm,
            converged,
            residual: last.residual,
            final_cost: last.cost.total,
            steps,
            notes: vec![format!("final p-center cost in the last annotation")],
        },
        records,
    })
}

fn run_pd(cfg: &ScenarioConfig) -> Result<RunOutput, ScenarioError> {
    use crate::dynamics::SecondOrderState;
    use crate::geometry::Vec2;
    let start: Vec<SecondOrderState> = initial_positions(cfg)
        .into_iter()
        .map(|p| SecondOrderState { p, v: Vec2::ZERO })
        .collect();
    let trace = pd_closed_loop(
        &cfg.polygon,
        &cfg.density,
        &start,
        PdGains {
            k_prop: cfg.k_prop,
            k_deriv: cfg.k_deriv,
        },
        cfg.h,
        cfg.horizon as usize,
        cfg.tol,
    )
    .map_err(|e| run_err(cfg.algorithm, e))?;
    let records: Vec<TrajectoryRecord> = (0..trace.times.len())
        .map(|k| {
            let coverage = trace.energy[k].coverage;
            TrajectoryRecord {
                time: trace.times[k],
                positions: trace.states[k].iter().map(|s| s.p).collect(),
                headings: None,
                cost: crate::objective::CostBreakdown::opaque(coverage),
                residual: trace.residuals[k],
                annotation: format!("E:{:.16e}", trace.energy[k].total),
            }
        })
        .collect();
    let residual = *trace.residuals.last().unwrap();
    Ok(RunOutput {
        summary: RunSummary {
            algorithm: cfg.algorithm,
            converged: residual < cfg.tol,
            residual,
            final_cost: trace.energy.last().unwrap().coverage,
            steps: trace.times.len() - 1,
            notes: vec!["energy column in the annotations".into()],
        },
        records,
    })
}

fn run_rounds(cfg: &ScenarioConfig, unicycle: bool) -> Result<RunOutput, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let positions = initial_positions(cfg);
    let mut states: Vec<VehicleState> = if unicycle {
        positions
            .iter()
            .map(|&p| {
                let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                VehicleState::Unicycle(UnicycleState::new(p.x, p.y, theta))
            })
            .collect()
    } else {
        positions.iter().map(|&p| VehicleState::first_order(p)).collect()
    };

    let rounds = cfg.horizon as usize;
    let mut records = Vec::new();
    let mut converged = false;
    let mut steps = 0;
    let mut last_res = f64::INFINITY;
    let mut last_cost = f64::NAN;
    for round in 0..=rounds {
        let config = Configuration::new(states.iter().map(|s| s.position()).collect());
        let (cost, res) = quadratic_cost_residual(&cfg.polygon, &cfg.density, &config)
            .map_err(|e| run_err(cfg.algorithm, e))?;
        let headings = unicycle.then(|| {
            states
                .iter()
                .map(|s| match s {
                    VehicleState::Unicycle(u) => u.theta,
                    _ => 0.0,
                })
                .collect()
        });
        records.push(TrajectoryRecord {
            time: round as f64 * cfg.delta,
            positions: config.positions().to_vec(),
            headings,
            cost,
            residual: res,
            annotation: format!("round:{round}"),
        });
        last_res = res;
        last_cost = cost.total;
        steps = round;
        if res < cfg.tol {
            converged = true;
            break;
        }
        if round == rounds {
            break;
        }
        states = if unicycle {
            local_controller_round(
                &cfg.polygon,
                &cfg.density,
                &states,
                cfg.delta,
                cfg.h,
                &UnicycleSeek { k_prop: cfg.k_prop },
            )
        } else {
            local_controller_round(
                &cfg.polygon,
                &cfg.density,
                &states,
                cfg.delta,
                cfg.h,
                &FirstOrderSeek,
            )
        }
        .map_err(|e| run_err(cfg.algorithm, e))?;
    }
    Ok(RunOutput {
        records,
        summary: RunSummary {
            algorithm: cfg.algorithm,
            converged,
            residual: last_res,
            final_cost: last_cost,
            steps,
            notes: Vec::new(),
        },
    })
}

fn run_distributed(cfg: &ScenarioConfig, mode: BehaviorMode) -> Result<RunOutput, ScenarioError> {
    let sim = build_network(cfg);
    let trace = sim
        .run(mode, cfg.horizon)
        .map_err(|e| run_err(cfg.algorithm, e))?;
    let records: Vec<TrajectoryRecord> = trace
        .records
        .iter()
        .map(|r| TrajectoryRecord {
            time: r.time,
            positions: r.positions.clone(),
            headings: None,
            cost: r.cost,
            residual: r.residual,
            annotation: r.annotation.clone(),
        })
        .collect();
    let last = trace.last().expect("trace holds at least the init row");
    Ok(RunOutput {
        summary: RunSummary {
            algorithm: cfg.algorithm,
            converged: last.residual < cfg.tol,
            residual: last.residual,
            final_cost: last.cost.total,
            steps: records.len(),
            notes: Vec::new(),
        },
        records,
    })
}

/// Build the network a distributed scenario describes: seeded placement and
/// per-agent clock rates, shared gap bounds and fairness.
pub fn build_network(cfg: &ScenarioConfig) -> NetworkSim {
    let positions = initial_positions(cfg);
    // clock rates come from an offset stream so placement and rates stay
    // independently reproducible
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let setups: Vec<AgentSetup> = positions
        .into_iter()
        .map(|position| AgentSetup {
            position,
            clock_rate: if cfg.clock_rate_range.0 == cfg.clock_rate_range.1 {
                cfg.clock_rate_range.0
            } else {
                rng.gen_range(cfg.clock_rate_range.0..cfg.clock_rate_range.1)
            },
            gap_min: cfg.gap_range.0,
            gap_max: cfg.gap_range.1,
            fairness_bound: cfg.fairness,
            initial_radius: cfg.initial_radius,
        })
        .collect();
    NetworkSim::new(
        cfg.polygon.clone(),
        cfg.density.clone(),
        setups,
        NetworkConfig {
            latency: cfg.latency,
            jitter: cfg.jitter,
            staleness_budget: cfg.staleness_budget,
            delta0: cfg.delta0,
            motion_fraction: cfg.motion_fraction,
            monitor_ticks: cfg.monitor_ticks,
            seed: cfg.seed,
        },
    )
}
