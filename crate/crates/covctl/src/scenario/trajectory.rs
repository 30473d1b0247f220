//! Line-delimited trajectory records with bit-stable serialization.
//!
//! One line per `(time, agent)` pair. Numbers carry 17 significant digits,
//! which round-trips every f64 exactly, so replay tooling can diff runs
//! byte for byte.

use super::ScenarioError;
use crate::geometry::Point2;
use crate::objective::CostBreakdown;

/// One sampled instant of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub time: f64,
    pub positions: Vec<Point2>,
    /// Present for unicycle runs only.
    pub headings: Option<Vec<f64>>,
    pub cost: CostBreakdown,
    pub residual: f64,
    /// Event annotation; serialized without whitespace.
    pub annotation: String,
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn sanitize(annotation: &str) -> String {
    if annotation.is_empty() {
        "-".to_string()
    } else {
        annotation
            .chars()
            .map(|c| if c.is_whitespace() { '-' } else { c })
            .collect()
    }
}

/// Serialize records, one line per `(time, agent)`. The header names the
/// exact column set; the `theta` column appears only when headings are
/// recorded.
pub fn emit_trajectory(records: &[TrajectoryRecord]) -> String {
    let with_theta = records.iter().any(|r| r.headings.is_some());
    let mut out = String::new();
    out.push_str(if with_theta {
        "# t id x y theta HV HV1 HV2 residual event\n"
    } else {
        "# t id x y HV HV1 HV2 residual event\n"
    });
    for r in records {
        let hv1 = r.cost.quantization.unwrap_or(f64::NAN);
        let hv2 = r.cost.displacement.unwrap_or(f64::NAN);
        for (i, p) in r.positions.iter().enumerate() {
            out.push_str(&fmt(r.time));
            out.push(' ');
            out.push_str(&i.to_string());
            out.push(' ');
            out.push_str(&fmt(p.x));
            out.push(' ');
            out.push_str(&fmt(p.y));
            if let Some(headings) = &r.headings {
                out.push(' ');
                out.push_str(&fmt(headings[i]));
            }
            out.push(' ');
            out.push_str(&fmt(r.cost.total));
            out.push(' ');
            out.push_str(&fmt(hv1));
            out.push(' ');
            out.push_str(&fmt(hv2));
            out.push(' ');
            out.push_str(&fmt(r.residual));
            out.push(' ');
            out.push_str(&sanitize(&r.annotation));
            out.push('\n');
        }
    }
    out
}

/// Parse the output of [`emit_trajectory`].
pub fn parse_trajectory(text: &str) -> Result<Vec<TrajectoryRecord>, ScenarioError> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(ScenarioError::Parse {
            line: 1,
            message: "empty trajectory".into(),
        });
    };
    let with_theta = match header {
        "# t id x y theta HV HV1 HV2 residual event" => true,
        "# t id x y HV HV1 HV2 residual event" => false,
        other => {
            return Err(ScenarioError::Parse {
                line: 1,
                message: format!("unrecognized header `{other}`"),
            })
        }
    };
    let ncols = if with_theta { 10 } else { 9 };

    let mut records: Vec<TrajectoryRecord> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != ncols {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!("expected {ncols} fields, got {}", fields.len()),
            });
        }
        let num = |s: &str| -> Result<f64, ScenarioError> {
            s.parse().map_err(|_| ScenarioError::Parse {
                line: line_no,
                message: format!("bad number `{s}`"),
            })
        };
        let t = num(fields[0])?;
        let id: usize = fields[1].parse().map_err(|_| ScenarioError::Parse {
            line: line_no,
            message: format!("bad agent id `{}`", fields[1]),
        })?;
        let x = num(fields[2])?;
        let y = num(fields[3])?;
        let mut col = 4;
        let theta = if with_theta {
            col += 1;
            Some(num(fields[4])?)
        } else {
            None
        };
        let hv = num(fields[col])?;
        let hv1 = num(fields[col + 1])?;
        let hv2 = num(fields[col + 2])?;
        let residual = num(fields[col + 3])?;
        let annotation = fields[col + 4].to_string();

        let start_new = match records.last() {
            Some(r) => r.time.to_bits() != t.to_bits() || id == 0,
            None => true,
        };
        if start_new {
            if id != 0 {
                return Err(ScenarioError::Parse {
                    line: line_no,
                    message: format!("record does not start at agent 0 (got {id})"),
                });
            }
            records.push(TrajectoryRecord {
                time: t,
                positions: Vec::new(),
                headings: theta.map(|_| Vec::new()),
                cost: CostBreakdown {
                    total: hv,
                    quantization: none_if_nan(hv1),
                    displacement: none_if_nan(hv2),
                },
                residual,
                annotation: annotation.clone(),
            });
        }
        let record = records.last_mut().unwrap();
        if id != record.positions.len() {
            return Err(ScenarioError::Parse {
                line: line_no,
                message: format!(
                    "agent ids out of order: got {id}, expected {}",
                    record.positions.len()
                ),
            });
        }
        record.positions.push(Point2::new(x, y));
        if let (Some(hs), Some(th)) = (&mut record.headings, theta) {
            hs.push(th);
        }
    }
    Ok(records)
}

fn none_if_nan(x: f64) -> Option<f64> {
    if x.is_nan() {
        None
    } else {
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64, n: usize) -> TrajectoryRecord {
        TrajectoryRecord {
            time: t,
            positions: (0..n)
                .map(|i| Point2::new(0.1 * i as f64 + t, 0.2 * i as f64))
                .collect(),
            headings: None,
            cost: CostBreakdown {
                total: 0.5 + t,
                quantization: Some(0.3),
                displacement: Some(0.2 + t),
            },
            residual: 0.01,
            annotation: format!("step:{t}"),
        }
    }

    #[test]
    fn empty_run_is_header_only() {
        let text = emit_trajectory(&[]);
        assert_eq!(text, "# t id x y HV HV1 HV2 residual event\n");
        assert!(parse_trajectory(&text).unwrap().is_empty());
    }

    #[test]
    fn single_record_round_trips() {
        let rec = record(0.0, 3);
        let text = emit_trajectory(std::slice::from_ref(&rec));
        let back = parse_trajectory(&text).unwrap();
        assert_eq!(back, vec![rec]);
    }

    #[test]
    fn long_run_replays_bit_identically() {
        // values with non-terminating binary expansions
        let records: Vec<TrajectoryRecord> = (0..1000)
            .map(|k| record(k as f64 * 0.1 + 1.0 / 3.0, 2))
            .collect();
        let text = emit_trajectory(&records);
        let back = parse_trajectory(&text).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.time.to_bits(), b.time.to_bits());
            assert_eq!(a.cost.total.to_bits(), b.cost.total.to_bits());
            for (p, q) in a.positions.iter().zip(&b.positions) {
                assert_eq!(p.x.to_bits(), q.x.to_bits());
                assert_eq!(p.y.to_bits(), q.y.to_bits());
            }
        }
        // second emission is byte-identical
        assert_eq!(text, emit_trajectory(&back));
    }

    #[test]
    fn heading_column_round_trips() {
        let rec = TrajectoryRecord {
            headings: Some(vec![0.1, -2.5]),
            ..record(0.5, 2)
        };
        let text = emit_trajectory(std::slice::from_ref(&rec));
        assert!(text.starts_with("# t id x y theta"));
        let back = parse_trajectory(&text).unwrap();
        assert_eq!(back[0].headings, Some(vec![0.1, -2.5]));
    }

    #[test]
    fn absent_breakdown_serializes_as_nan() {
        let rec = TrajectoryRecord {
            cost: CostBreakdown::opaque(1.5),
            ..record(0.0, 1)
        };
        let text = emit_trajectory(std::slice::from_ref(&rec));
        assert!(text.contains("NaN"));
        let back = parse_trajectory(&text).unwrap();
        assert_eq!(back[0].cost.quantization, None);
        assert_eq!(back[0].cost.displacement, None);
    }
}
