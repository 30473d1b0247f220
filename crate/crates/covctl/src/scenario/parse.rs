//! The flat `[section]` / `key = value` scenario format.

use std::collections::BTreeMap;

use super::{Algorithm, Placement, ScenarioConfig, ScenarioError};
use crate::density::DensityField;
use crate::geometry::{ConvexPolygon, GeometryError, Point2};

struct Raw {
    /// `(section, key)` -> `(value, line)`
    entries: BTreeMap<(String, String), (String, usize)>,
    /// section -> header line
    sections: BTreeMap<String, usize>,
}

impl Raw {
    fn get(&self, section: &str, key: &str) -> Option<&(String, usize)> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn require(&self, section: &str, key: &str) -> Result<&(String, usize), ScenarioError> {
        self.get(section, key).ok_or_else(|| ScenarioError::Parse {
            line: self.sections.get(section).copied().unwrap_or(0),
            message: format!("missing key `{key}` in section [{section}]"),
        })
    }

    fn f64(&self, section: &str, key: &str) -> Result<f64, ScenarioError> {
        let (v, line) = self.require(section, key)?;
        parse_f64(v, *line)
    }

    fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ScenarioError> {
        match self.get(section, key) {
            Some((v, line)) => parse_f64(v, *line),
            None => Ok(default),
        }
    }

    fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize, ScenarioError> {
        match self.get(section, key) {
            Some((v, line)) => v.parse().map_err(|_| ScenarioError::Parse {
                line: *line,
                message: format!("expected an unsigned integer, got `{v}`"),
            }),
            None => Ok(default),
        }
    }
}

fn parse_f64(v: &str, line: usize) -> Result<f64, ScenarioError> {
    v.parse().map_err(|_| ScenarioError::Parse {
        line,
        message: format!("expected a number, got `{v}`"),
    })
}

fn parse_points(v: &str, line: usize) -> Result<Vec<Point2>, ScenarioError> {
    v.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let mut it = pair.split(',').map(str::trim);
            let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
                return Err(ScenarioError::Parse {
                    line,
                    message: format!("expected `x,y`, got `{pair}`"),
                });
            };
            Ok(Point2::new(parse_f64(x, line)?, parse_f64(y, line)?))
        })
        .collect()
}

fn tokenize(text: &str) -> Result<Raw, ScenarioError> {
    let mut entries = BTreeMap::new();
    let mut sections = BTreeMap::new();
    let mut current = String::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: "unterminated section header".into(),
                });
            };
            current = name.trim().to_string();
            sections.insert(current.clone(), line_no);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        if current.is_empty() {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: "key outside of any [section]".into(),
            });
        }
        entries.insert(
            (current.clone(), key.trim().to_string()),
            (value.trim().to_string(), line_no),
        );
    }
    Ok(Raw { entries, sections })
}

/// Parse and validate a scenario file.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let raw = tokenize(text)?;

    let (poly_text, poly_line) = raw.require("environment", "polygon")?;
    let vertices = parse_points(poly_text, *poly_line)?;
    let polygon = ConvexPolygon::new(vertices).map_err(|e| match e {
        GeometryError::EmptyRegion => ScenarioError::Validation {
            message: "nonconvex or degenerate environment polygon".into(),
        },
        other => ScenarioError::Validation {
            message: other.to_string(),
        },
    })?;

    let (n_text, n_line) = raw.require("agents", "n")?;
    let n: usize = n_text.parse().map_err(|_| ScenarioError::Parse {
        line: *n_line,
        message: format!("expected an agent count, got `{n_text}`"),
    })?;
    if n == 0 {
        return Err(ScenarioError::Validation {
            message: "n must be at least 1".into(),
        });
    }

    let placement = match raw.get("agents", "placement") {
        Some((v, line)) => match v.as_str() {
            "random" => Placement::Random,
            "explicit" => {
                let (pos_text, pos_line) = raw.require("agents", "positions")?;
                let positions = parse_points(pos_text, *pos_line)?;
                if positions.len() != n {
                    return Err(ScenarioError::Validation {
                        message: format!("{} positions listed for n = {n}", positions.len()),
                    });
                }
                for (i, p) in positions.iter().enumerate() {
                    if !polygon.contains_with_slack(*p, 1e-12) {
                        return Err(ScenarioError::Validation {
                            message: format!("position {i} ({}, {}) outside Q", p.x, p.y),
                        });
                    }
                }
                Placement::Explicit(positions)
            }
            other => {
                return Err(ScenarioError::Parse {
                    line: *line,
                    message: format!("unknown placement `{other}` (random | explicit)"),
                })
            }
        },
        None => Placement::Random,
    };

    let seed = match raw.get("agents", "seed") {
        Some((v, line)) => v.parse().map_err(|_| ScenarioError::Parse {
            line: *line,
            message: format!("expected a seed, got `{v}`"),
        })?,
        None => 0u64,
    };

    let clock_rate_range = (
        raw.f64_or("agents", "clock_rate_min", 1.0)?,
        raw.f64_or("agents", "clock_rate_max", 1.0)?,
    );
    let gap_range = (
        raw.f64_or("agents", "gap_min", 0.08)?,
        raw.f64_or("agents", "gap_max", 0.12)?,
    );
    let fairness = raw.usize_or("agents", "fairness", 3)?;
    let initial_radius = raw.f64_or("agents", "initial_radius", 0.2)?;

    let density = parse_density(&raw)?;

    let (alg_text, alg_line) = raw.require("run", "algorithm")?;
    let algorithm = Algorithm::from_name(alg_text).ok_or_else(|| ScenarioError::Parse {
        line: *alg_line,
        message: format!("unknown algorithm `{alg_text}`"),
    })?;

    let cfg = ScenarioConfig {
        polygon,
        n,
        placement,
        seed,
        clock_rate_range,
        gap_range,
        fairness,
        initial_radius,
        density,
        algorithm,
        k_prop: raw.f64_or("run", "k_prop", 1.0)?,
        k_deriv: raw.f64_or("run", "k_deriv", 1.0)?,
        delta0: raw.f64_or("run", "delta0", 0.05)?,
        delta: raw.f64_or("run", "delta", 0.5)?,
        h: raw.f64_or("run", "h", 0.02)?,
        horizon: raw.f64("run", "horizon")?,
        tol: raw.f64_or("run", "tol", 1e-3)?,
        latency: raw.f64_or("run", "latency", 0.0)?,
        jitter: raw.f64_or("run", "jitter", 0.0)?,
        staleness_budget: raw.f64_or("run", "staleness_budget", 0.5)?,
        motion_fraction: raw.f64_or("run", "motion_fraction", 0.9)?,
        monitor_ticks: raw.usize_or("run", "monitor_ticks", 2)?,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn parse_density(raw: &Raw) -> Result<DensityField, ScenarioError> {
    let kind = match raw.get("density", "kind") {
        Some((v, _)) => v.clone(),
        None => "uniform".to_string(),
    };
    let center = |raw: &Raw| -> Result<Point2, ScenarioError> {
        match raw.get("density", "center") {
            Some((v, line)) => {
                let pts = parse_points(v, *line)?;
                if pts.len() != 1 {
                    return Err(ScenarioError::Parse {
                        line: *line,
                        message: "center takes a single `x,y` pair".into(),
                    });
                }
                Ok(pts[0])
            }
            None => Ok(Point2::new(0.0, 0.0)),
        }
    };
    Ok(match kind.as_str() {
        "uniform" => DensityField::Uniform,
        "gaussian" => DensityField::Gaussian {
            center: center(raw)?,
            gain: raw.f64_or("density", "gain", 1.0)?,
        },
        "line" => DensityField::Line {
            a: raw.f64("density", "a")?,
            b: raw.f64("density", "b")?,
            c: raw.f64_or("density", "c", 0.0)?,
            k: raw.f64_or("density", "k", 500.0)?,
        },
        "ellipse" => DensityField::Ellipse {
            a: raw.f64("density", "a")?,
            b: raw.f64("density", "b")?,
            center: center(raw)?,
            r2: raw.f64("density", "r2")?,
            k: raw.f64_or("density", "k", 500.0)?,
        },
        "disk" => DensityField::Disk {
            a: raw.f64("density", "a")?,
            b: raw.f64("density", "b")?,
            center: center(raw)?,
            r2: raw.f64("density", "r2")?,
            k: raw.f64_or("density", "k", 500.0)?,
            ell: raw.f64_or("density", "ell", 10.0)?,
        },
        other => {
            let line = raw.get("density", "kind").map(|(_, l)| *l).unwrap_or(0);
            return Err(ScenarioError::Parse {
                line,
                message: format!("unknown density kind `{other}`"),
            });
        }
    })
}

fn validate(cfg: &ScenarioConfig) -> Result<(), ScenarioError> {
    let bad = |message: String| Err(ScenarioError::Validation { message });
    if let DensityField::Line { a, b, .. } = cfg.density {
        if a == 0.0 && b == 0.0 {
            return bad("line density needs (a, b) != (0, 0)".into());
        }
    }
    if cfg.k_prop <= 0.0 {
        return bad("k_prop must be positive".into());
    }
    if cfg.algorithm == Algorithm::Pd && cfg.k_deriv <= 0.0 {
        return bad("k_deriv must be positive".into());
    }
    if cfg.h <= 0.0 {
        return bad("h must be positive".into());
    }
    if cfg.horizon <= 0.0 {
        return bad("horizon must be positive".into());
    }
    if cfg.tol <= 0.0 {
        return bad("tol must be positive".into());
    }
    if cfg.delta0 <= 0.0 || cfg.delta <= 0.0 {
        return bad("delta0 and delta must be positive".into());
    }
    if !(cfg.clock_rate_range.0 > 0.0 && cfg.clock_rate_range.1 >= cfg.clock_rate_range.0) {
        return bad("clock rate range must be positive and ordered".into());
    }
    if !(cfg.gap_range.0 > 0.0 && cfg.gap_range.1 > cfg.gap_range.0) {
        return bad("gap range must be positive with gap_min < gap_max".into());
    }
    if !(cfg.motion_fraction > 0.0 && cfg.motion_fraction < 1.0) {
        return bad("motion_fraction must lie strictly between 0 and 1".into());
    }
    if cfg.monitor_ticks == 0 {
        return bad("monitor_ticks must be at least 1".into());
    }
    if cfg.fairness == 0 {
        return bad("fairness bound must be at least 1".into());
    }
    if cfg.initial_radius <= 0.0 {
        return bad("initial_radius must be positive".into());
    }
    if cfg.latency < 0.0 || cfg.jitter < 0.0 || cfg.staleness_budget < 0.0 {
        return bad("latency, jitter, and staleness_budget must be nonnegative".into());
    }
    Ok(())
}
