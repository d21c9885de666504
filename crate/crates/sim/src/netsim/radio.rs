use serde::{Deserialize, Serialize};

/// Unit-disk, loss-free radio with a fixed per-hop latency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioConfig {
    pub range: f64,
    pub link_rate_bps: f64,
    /// Propagation and processing delay added to every hop, in seconds.
    pub per_hop_delay: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self { range: 250.0, link_rate_bps: 2.0e6, per_hop_delay: 0.001 }
    }
}

impl RadioConfig {
    pub fn serialization(&self, bytes: usize) -> f64 {
        bytes as f64 * 8.0 / self.link_rate_bps
    }

    /// Time from transmission start to delivery at a neighbour.
    pub fn latency(&self, bytes: usize) -> f64 {
        self.serialization(bytes) + self.per_hop_delay
    }
}
