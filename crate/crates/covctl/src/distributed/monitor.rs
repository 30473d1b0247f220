//! Cell maintenance and event detection.
//!
//! The monitoring loop keeps an agent's cell current by re-running the
//! radius adjustment, and raises a recomputation request whenever some
//! other agent's weight jumps by at least 2: an inactive neighbor became
//! active (1 -> 3) or an active agent newly became a Voronoi neighbor
//! (0 -> 3).

use super::{adjust_sensing_radius, neighbors_of_cell, weight_map, DistributedError};
use crate::geometry::{ConvexPolygon, Point2};

/// A sampled instant of the world as the monitoring agent perceives it:
/// true positions and per-agent activity flags.
#[derive(Debug, Clone)]
pub struct WorldTick {
    pub time: f64,
    pub positions: Vec<Point2>,
    pub active: Vec<bool>,
}

/// A raised recomputation request, with the weight transition that fired it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorEvent {
    pub time: f64,
    /// The agent whose weight jumped.
    pub trigger_agent: usize,
    pub from_weight: u8,
    pub to_weight: u8,
}

/// What a monitoring window produced.
#[derive(Debug, Clone)]
pub struct MonitorOutcome {
    pub events: Vec<MonitorEvent>,
    pub final_weights: Vec<u8>,
    pub final_cell: ConvexPolygon,
    pub final_radius: f64,
}

/// Run the monitoring loop for agent `agent` over a scripted sequence of
/// world states. The first tick initializes the stored weights; each later
/// tick re-runs the radius adjustment against the scripted positions,
/// recomputes the weights, and emits one recomputation request per weight
/// jump of at least 2 before storing the new weights.
pub fn monitoring_run(
    region: &ConvexPolygon,
    agent: usize,
    initial_radius: f64,
    script: &[WorldTick],
) -> Result<MonitorOutcome, DistributedError> {
    assert!(!script.is_empty(), "monitoring needs at least one tick");
    let n = script[0].positions.len();

    let evaluate = |tick: &WorldTick,
                    radius: f64|
     -> Result<(f64, ConvexPolygon, Vec<u8>), DistributedError> {
        let position = tick.positions[agent];
        let (r, cell) = adjust_sensing_radius(region, agent, position, radius, &tick.positions)?;
        let others: Vec<(usize, Point2)> = tick
            .positions
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != agent)
            .map(|(j, &p)| (j, p))
            .collect();
        let neighbors = neighbors_of_cell(&cell, position, &others);
        Ok((r, cell, weight_map(n, &neighbors, &tick.active)))
    };

    let (mut radius, mut cell, mut weights) = evaluate(&script[0], initial_radius)?;
    let mut events = Vec::new();
    for tick in &script[1..] {
        let (r, c, w) = evaluate(tick, radius)?;
        radius = r;
        cell = c;
        let mut jumped = false;
        for j in 0..n {
            if w[j] >= weights[j] + 2 {
                events.push(MonitorEvent {
                    time: tick.time,
                    trigger_agent: j,
                    from_weight: weights[j],
                    to_weight: w[j],
                });
                jumped = true;
            }
        }
        if jumped {
            weights = w;
        }
    }
    Ok(MonitorOutcome {
        events,
        final_weights: weights,
        final_cell: cell,
        final_radius: radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(0.0, 0.0, 1.0, 1.0)
    }

    /// Three collinear agents: 1 sits between 0 and 2, so 2 is not a
    /// neighbor of 0 until it moves aside.
    fn base_positions() -> Vec<Point2> {
        vec![
            Point2::new(0.1, 0.5),
            Point2::new(0.5, 0.5),
            Point2::new(0.9, 0.5),
        ]
    }

    #[test]
    fn static_inactive_world_raises_nothing() {
        let script: Vec<WorldTick> = (0..4)
            .map(|k| WorldTick {
                time: k as f64 * 0.1,
                positions: base_positions(),
                active: vec![false; 3],
            })
            .collect();
        let out = monitoring_run(&unit_square(), 0, 0.2, &script).unwrap();
        assert!(out.events.is_empty());
        assert_eq!(out.final_weights, vec![0, 1, 0]);
    }

    #[test]
    fn neighbor_activation_fires_once() {
        let mut script = vec![WorldTick {
            time: 0.0,
            positions: base_positions(),
            active: vec![false; 3],
        }];
        // agent 1 becomes active: weight 1 -> 3
        script.push(WorldTick {
            time: 0.1,
            positions: base_positions(),
            active: vec![false, true, false],
        });
        script.push(WorldTick {
            time: 0.2,
            positions: base_positions(),
            active: vec![false, true, false],
        });
        let out = monitoring_run(&unit_square(), 0, 0.2, &script).unwrap();
        assert_eq!(out.events.len(), 1);
        assert_eq!(out.events[0].trigger_agent, 1);
        assert_eq!((out.events[0].from_weight, out.events[0].to_weight), (1, 3));
    }

    #[test]
    fn active_agent_entering_neighborhood_fires_once() {
        let mut script = vec![WorldTick {
            time: 0.0,
            positions: base_positions(),
            active: vec![false; 3],
        }];
        // agent 2 moves off the line while active; its cell now touches 0's
        let mut moved = base_positions();
        moved[2] = Point2::new(0.5, 0.1);
        script.push(WorldTick {
            time: 0.1,
            positions: moved,
            active: vec![false, false, true],
        });
        let out = monitoring_run(&unit_square(), 0, 0.2, &script).unwrap();
        assert_eq!(out.events.len(), 1);
        assert_eq!(out.events[0].trigger_agent, 2);
        assert_eq!((out.events[0].from_weight, out.events[0].to_weight), (0, 3));
    }
}
