use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{stream, Stream};
use crate::NodeId;

/// Constant-bit-rate flow of fixed-size packets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CbrFlow {
    pub source: NodeId,
    pub destination: NodeId,
    pub packet_size: usize,
    pub interval: f64,
    pub start: f64,
    pub stop: f64,
}

impl CbrFlow {
    pub fn validate(&self) -> Result<(), String> {
        if self.source == self.destination {
            return Err(format!("flow source and destination are both node {}", self.source));
        }
        if !(self.interval > 0.0) {
            return Err(format!("flow interval must be positive, got {}", self.interval));
        }
        if self.stop < self.start {
            return Err("flow stops before it starts".into());
        }
        Ok(())
    }

    /// Emission times in `[start, stop)`.
    pub fn emissions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..)
            .map(move |k| self.start + k as f64 * self.interval)
            .take_while(move |&t| t < self.stop)
    }
}

/// Draws `count` flows between distinct random node pairs. Distinct flows
/// use distinct sources while enough nodes exist. Start times are uniform
/// in `[start_window.0, start_window.1)`.
pub fn generate_flows(
    nodes: usize,
    count: usize,
    packet_size: usize,
    interval: f64,
    start_window: (f64, f64),
    stop: f64,
    seed: u64,
) -> Vec<CbrFlow> {
    if nodes < 2 {
        return Vec::new();
    }
    let mut rng = stream(seed, Stream::Traffic);
    let mut sources: Vec<NodeId> = (0..nodes).collect();
    sources.shuffle(&mut rng);
    (0..count)
        .map(|k| {
            let source = sources[k % nodes];
            let mut destination = rng.gen_range(0..nodes - 1);
            if destination >= source {
                destination += 1;
            }
            let (lo, hi) = start_window;
            let start = if hi > lo { rng.gen_range(lo..hi) } else { lo };
            CbrFlow { source, destination, packet_size, interval, start, stop }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flows_are_valid_and_deterministic() {
        let a = generate_flows(10, 6, 512, 0.25, (1.0, 5.0), 60.0, 9);
        assert_eq!(a, generate_flows(10, 6, 512, 0.25, (1.0, 5.0), 60.0, 9));
        for f in &a {
            f.validate().unwrap();
            assert!(f.start >= 1.0 && f.start < 5.0);
        }
        let mut srcs: Vec<_> = a.iter().map(|f| f.source).collect();
        srcs.sort();
        srcs.dedup();
        assert_eq!(srcs.len(), 6);
    }

    #[test]
    fn emission_count() {
        let f = CbrFlow { source: 0, destination: 1, packet_size: 512, interval: 0.25, start: 0.0, stop: 1.0 };
        assert_eq!(f.emissions().count(), 4);
    }
}
