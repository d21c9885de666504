use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rng::{stream, Stream};
use super::topology::{Point, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MobilityConfig {
    /// Lower speed bound in m/s.
    pub min_speed: f64,
    /// Upper speed bound in m/s; speeds are drawn uniformly in `[min, max]`.
    pub max_speed: f64,
    /// Seconds spent at each waypoint, including the initial position.
    pub pause: f64,
    /// Mobility step length in seconds.
    pub dt: f64,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self { min_speed: 0.0, max_speed: 0.0, pause: 0.0, dt: 0.1 }
    }
}

impl MobilityConfig {
    /// Every node moves at exactly `speed`.
    pub fn constant(speed: f64, pause: f64) -> Self {
        Self { min_speed: speed, max_speed: speed, pause, dt: 0.1 }
    }

    pub fn is_static(&self) -> bool {
        self.max_speed <= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeMotion {
    pub target: Point,
    pub speed: f64,
    pub pause_until: f64,
}

/// Random-waypoint state for every node of a topology.
#[derive(Debug, Clone)]
pub struct RandomWaypoint {
    config: MobilityConfig,
    nodes: Vec<NodeMotion>,
    rng: ChaCha8Rng,
}

impl RandomWaypoint {
    /// Every node begins with a pause at its initial position.
    pub fn new(config: MobilityConfig, topology: &Topology, seed: u64) -> Self {
        let mut rng = stream(seed, Stream::Mobility);
        let (w, h) = topology.area();
        let nodes = topology
            .positions()
            .iter()
            .map(|_| {
                let target = Point::new(rng.gen::<f64>() * w, rng.gen::<f64>() * h);
                NodeMotion { target, speed: draw_speed(&config, &mut rng), pause_until: config.pause }
            })
            .collect();
        Self { config, nodes, rng }
    }

    /// Explicit per-node state; used for scripted motion in tests.
    pub fn with_states(config: MobilityConfig, nodes: Vec<NodeMotion>, seed: u64) -> Self {
        Self { config, nodes, rng: stream(seed, Stream::Mobility) }
    }

    pub fn config(&self) -> &MobilityConfig {
        &self.config
    }

    pub fn state(&self, node: usize) -> &NodeMotion {
        &self.nodes[node]
    }

    /// Advances every node by `dt` seconds starting at `now` and refreshes
    /// adjacency. A node reaching its waypoint stops there for the pause
    /// time, then heads to a fresh uniform waypoint.
    pub fn step(&mut self, topology: &mut Topology, now: f64, dt: f64) {
        let (w, h) = topology.area();
        let end = now + dt;
        for (i, pos) in topology.positions_mut().iter_mut().enumerate() {
            let m = &mut self.nodes[i];
            let mut t = now;
            // Bounded: each pass either finishes the step or consumes a leg.
            for _ in 0..4 {
                if t >= end {
                    break;
                }
                if m.pause_until > t {
                    t = m.pause_until.min(end);
                    continue;
                }
                if m.speed <= 0.0 {
                    break;
                }
                let dist = pos.distance(m.target);
                let travel = m.speed * (end - t);
                if travel + 1e-12 >= dist {
                    *pos = m.target;
                    t += dist / m.speed;
                    m.pause_until = t + self.config.pause;
                    m.target = Point::new(self.rng.gen::<f64>() * w, self.rng.gen::<f64>() * h);
                    m.speed = draw_speed(&self.config, &mut self.rng);
                } else {
                    let f = travel / dist;
                    pos.x += (m.target.x - pos.x) * f;
                    pos.y += (m.target.y - pos.y) * f;
                    t = end;
                }
            }
        }
        topology.refresh();
    }
}

fn draw_speed(config: &MobilityConfig, rng: &mut ChaCha8Rng) -> f64 {
    if config.max_speed <= config.min_speed {
        config.max_speed.max(0.0)
    } else {
        rng.gen_range(config.min_speed..=config.max_speed)
    }
}
