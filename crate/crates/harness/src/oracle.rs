use overhead_sim::netsim::rng::{stream, Stream};
use overhead_sim::{NodeId, Topology};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Sample mean and standard error of flood transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Transmissions of one probabilistic flood, the source's own included.
fn flood_once(topology: &Topology, source: NodeId, p: f64, rng: &mut ChaCha8Rng, heard: &mut [bool], stack: &mut Vec<NodeId>) -> u64 {
    heard.fill(false);
    heard[source] = true;
    stack.clear();
    stack.push(source);
    let mut tx = 0;
    while let Some(u) = stack.pop() {
        tx += 1;
        for &v in topology.neighbors(u) {
            if !heard[v] {
                heard[v] = true;
                if p >= 1.0 || (p > 0.0 && rng.gen::<f64>() < p) {
                    stack.push(v);
                }
            }
        }
    }
    tx
}

/// Monte-Carlo blind flood from `source`: every first-time receiver
/// rebroadcasts with probability `p`. Counts every transmission.
pub fn flooding_oracle(topology: &Topology, source: NodeId, p: f64, trials: usize, seed: u64) -> OracleEstimate {
    let mut rng = stream(seed, Stream::Oracle);
    estimate(topology, source, p, trials.max(1), &mut rng)
}

fn estimate(topology: &Topology, source: NodeId, p: f64, trials: usize, rng: &mut ChaCha8Rng) -> OracleEstimate {
    let mut heard = vec![false; topology.len()];
    let mut stack = Vec::with_capacity(topology.len());
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..trials {
        let x = flood_once(topology, source, p, rng, &mut heard, &mut stack) as f64;
        sum += x;
        sq += x * x;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 { ((sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    OracleEstimate { mean, stderr: (var / n).sqrt(), trials }
}

/// Rebroadcasts per flood averaged over every node as source, the
/// originator's transmission excluded.
pub fn network_flood_oracle(topology: &Topology, p: f64, trials_per_source: usize, seed: u64) -> OracleEstimate {
    let mut rng = stream(seed, Stream::Oracle);
    let n = topology.len().max(1) as f64;
    let (mut mean, mut var) = (0.0, 0.0);
    for s in 0..topology.len() {
        let e = estimate(topology, s, p, trials_per_source.max(1), &mut rng);
        mean += (e.mean - 1.0) / n;
        var += e.stderr * e.stderr / (n * n);
    }
    OracleEstimate { mean, stderr: var.sqrt(), trials: trials_per_source * topology.len() }
}
