//! Scenario configuration, trajectory logging, SVG snapshots, and the run
//! dispatcher behind the CLI.
//!
//! Scenarios are flat text files with `[section]` headers and `key = value`
//! lines; vertex lists are semicolon-separated coordinate pairs. The format
//! favors line-level error reporting over nesting. Trajectories are emitted
//! one record line per `(time, agent)` with 17 significant digits so that a
//! replay parses to bit-identical values.

mod parse;
mod run;
mod svg;
mod trajectory;

pub use parse::parse_scenario;
pub use run::{build_network, initial_positions, run_scenario, RunOutput, RunSummary};
pub use svg::emit_svg;
pub use trajectory::{emit_trajectory, parse_trajectory, TrajectoryRecord};

use crate::density::DensityField;
use crate::geometry::{ConvexPolygon, Point2};

/// Errors from scenario handling.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {message}")]
    Validation { message: String },
    #[error("{algorithm} run failed: {source}")]
    Run {
        algorithm: String,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

/// How initial positions are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    /// Seeded uniform rejection sampling inside the environment.
    Random,
    /// Listed positions (validated inside the environment). The loader adds
    /// a seeded perturbation of magnitude 1e-9 as a tie-breaker against
    /// agents sitting exactly on bisector vertices.
    Explicit(Vec<Point2>),
}

/// The algorithms a scenario can dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    LloydContinuous,
    LloydMap,
    PCenter,
    Pd,
    Unicycle,
    LocalRounds,
    DistI,
    DistII,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LloydContinuous => "lloyd-continuous",
            Algorithm::LloydMap => "lloyd-map",
            Algorithm::PCenter => "pcenter",
            Algorithm::Pd => "pd",
            Algorithm::Unicycle => "unicycle",
            Algorithm::LocalRounds => "local-rounds",
            Algorithm::DistI => "dist-I",
            Algorithm::DistII => "dist-II",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "lloyd-continuous" => Algorithm::LloydContinuous,
            "lloyd-map" => Algorithm::LloydMap,
            "pcenter" => Algorithm::PCenter,
            "pd" => Algorithm::Pd,
            "unicycle" => Algorithm::Unicycle,
            "local-rounds" => Algorithm::LocalRounds,
            "dist-I" => Algorithm::DistI,
            "dist-II" => Algorithm::DistII,
            _ => return None,
        })
    }
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub polygon: ConvexPolygon,
    pub n: usize,
    pub placement: Placement,
    pub seed: u64,
    /// Per-agent clock rates are drawn uniformly from this range.
    pub clock_rate_range: (f64, f64),
    /// Wake-gap bounds in local clock time.
    pub gap_range: (f64, f64),
    pub fairness: usize,
    pub initial_radius: f64,
    pub density: DensityField,
    pub algorithm: Algorithm,
    pub k_prop: f64,
    pub k_deriv: f64,
    pub delta0: f64,
    pub delta: f64,
    pub h: f64,
    /// Steps or rounds for the stepped algorithms; global time for the
    /// distributed behaviors.
    pub horizon: f64,
    pub tol: f64,
    pub latency: f64,
    pub jitter: f64,
    pub staleness_budget: f64,
    pub motion_fraction: f64,
    pub monitor_ticks: usize,
}

impl ScenarioConfig {
    /// Canonical text form: parsing it back yields an equal config, and
    /// re-emitting yields identical bytes.
    pub fn to_canonical_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(s, "[environment]").unwrap();
        let vertices: Vec<String> = self
            .polygon
            .vertices()
            .iter()
            .map(|v| format!("{},{}", v.x, v.y))
            .collect();
        writeln!(s, "polygon = {}", vertices.join("; ")).unwrap();
        writeln!(s).unwrap();
        writeln!(s, "[agents]").unwrap();
        writeln!(s, "n = {}", self.n).unwrap();
        match &self.placement {
            Placement::Random => writeln!(s, "placement = random").unwrap(),
            Placement::Explicit(ps) => {
                writeln!(s, "placement = explicit").unwrap();
                let ps: Vec<String> = ps.iter().map(|p| format!("{},{}", p.x, p.y)).collect();
                writeln!(s, "positions = {}", ps.join("; ")).unwrap();
            }
        }
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "clock_rate_min = {}", self.clock_rate_range.0).unwrap();
        writeln!(s, "clock_rate_max = {}", self.clock_rate_range.1).unwrap();
        writeln!(s, "gap_min = {}", self.gap_range.0).unwrap();
        writeln!(s, "gap_max = {}", self.gap_range.1).unwrap();
        writeln!(s, "fairness = {}", self.fairness).unwrap();
        writeln!(s, "initial_radius = {}", self.initial_radius).unwrap();
        writeln!(s).unwrap();
        writeln!(s, "[density]").unwrap();
        match &self.density {
            DensityField::Uniform => writeln!(s, "kind = uniform").unwrap(),
            DensityField::Gaussian { center, gain } => {
                writeln!(s, "kind = gaussian").unwrap();
                writeln!(s, "gain = {gain}").unwrap();
                writeln!(s, "center = {},{}", center.x, center.y).unwrap();
            }
            DensityField::Line { a, b, c, k } => {
                writeln!(s, "kind = line").unwrap();
                writeln!(s, "a = {a}").unwrap();
                writeln!(s, "b = {b}").unwrap();
                writeln!(s, "c = {c}").unwrap();
                writeln!(s, "k = {k}").unwrap();
            }
            DensityField::Ellipse { a, b, center, r2, k } => {
                writeln!(s, "kind = ellipse").unwrap();
                writeln!(s, "a = {a}").unwrap();
                writeln!(s, "b = {b}").unwrap();
                writeln!(s, "center = {},{}", center.x, center.y).unwrap();
                writeln!(s, "r2 = {r2}").unwrap();
                writeln!(s, "k = {k}").unwrap();
            }
            DensityField::Disk {
                a,
                b,
                center,
                r2,
                k,
                ell,
            } => {
                writeln!(s, "kind = disk").unwrap();
                writeln!(s, "a = {a}").unwrap();
                writeln!(s, "b = {b}").unwrap();
                writeln!(s, "center = {},{}", center.x, center.y).unwrap();
                writeln!(s, "r2 = {r2}").unwrap();
                writeln!(s, "k = {k}").unwrap();
                writeln!(s, "ell = {ell}").unwrap();
            }
        }
        writeln!(s).unwrap();
        writeln!(s, "[run]").unwrap();
        writeln!(s, "algorithm = {}", self.algorithm.name()).unwrap();
        writeln!(s, "k_prop = {}", self.k_prop).unwrap();
        writeln!(s, "k_deriv = {}", self.k_deriv).unwrap();
        writeln!(s, "delta0 = {}", self.delta0).unwrap();
        writeln!(s, "delta = {}", self.delta).unwrap();
        writeln!(s, "h = {}", self.h).unwrap();
        writeln!(s, "horizon = {}", self.horizon).unwrap();
        writeln!(s, "tol = {}", self.tol).unwrap();
        writeln!(s, "latency = {}", self.latency).unwrap();
        writeln!(s, "jitter = {}", self.jitter).unwrap();
        writeln!(s, "staleness_budget = {}", self.staleness_budget).unwrap();
        writeln!(s, "motion_fraction = {}", self.motion_fraction).unwrap();
        writeln!(s, "monitor_ticks = {}", self.monitor_ticks).unwrap();
        s
    }
}
