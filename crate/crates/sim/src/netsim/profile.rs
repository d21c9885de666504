use overhead_core::{ModelError, NetworkProfile};

use super::topology::Topology;
use crate::NodeId;

/// Flooding statistics seen from one source.
///
/// `d_avg` is the mean degree over all nodes. `d_f[j-1]` is the mean number
/// of nodes at BFS depth `j+1` reached per node at depth `j`, so each
/// next-depth node counts once even when several depth-`j` nodes hear it.
/// Entries cover depths `1..H-1` for eccentricity `H`, with at least one
/// entry whenever the source has a neighbour.
pub fn measure_profile(
    topology: &Topology,
    source: NodeId,
    p_broadcast: f64,
) -> Result<NetworkProfile, ModelError> {
    let counts = depth_counts(topology, source);
    profile_from_counts(topology.mean_degree(), &counts, p_broadcast)
}

/// Profile pooled over every node as source: depth populations are summed
/// across all BFS trees before taking ratios.
pub fn measure_network_profile(topology: &Topology, p_broadcast: f64) -> Result<NetworkProfile, ModelError> {
    let mut pooled: Vec<f64> = Vec::new();
    for s in 0..topology.len() {
        for (j, c) in depth_counts(topology, s).into_iter().enumerate() {
            if j >= pooled.len() {
                pooled.push(0.0);
            }
            pooled[j] += c;
        }
    }
    profile_from_counts(topology.mean_degree(), &pooled, p_broadcast)
}

/// Largest BFS depth reachable from any source.
pub fn network_eccentricity(topology: &Topology) -> u32 {
    (0..topology.len())
        .filter_map(|s| topology.bfs_depths(s).into_iter().flatten().max())
        .max()
        .unwrap_or(0)
}

/// Node counts per depth, index 0 is the source itself.
fn depth_counts(topology: &Topology, source: NodeId) -> Vec<f64> {
    let mut counts: Vec<f64> = Vec::new();
    for d in topology.bfs_depths(source).into_iter().flatten() {
        let d = d as usize;
        if d >= counts.len() {
            counts.resize(d + 1, 0.0);
        }
        counts[d] += 1.0;
    }
    counts
}

fn profile_from_counts(d_avg: f64, counts: &[f64], p: f64) -> Result<NetworkProfile, ModelError> {
    let ecc = counts.len().saturating_sub(1);
    let entries = if ecc == 0 { 0 } else { (ecc - 1).max(1) };
    let d_f = (1..=entries)
        .map(|j| {
            let here = counts.get(j).copied().unwrap_or(0.0);
            let next = counts.get(j + 1).copied().unwrap_or(0.0);
            if here > 0.0 { next / here } else { 0.0 }
        })
        .collect();
    NetworkProfile::new(p, d_avg, d_f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_profile() {
        let t = Topology::from_edges(3, &[(0, 1), (1, 2)]);
        let p = measure_profile(&t, 0, 1.0).unwrap();
        assert_eq!(p.d_avg, 4.0 / 3.0);
        assert_eq!(p.d_f, vec![1.0]);
    }

    #[test]
    fn complete_graph_profile() {
        let t = Topology::complete(4, 100.0);
        let p = measure_profile(&t, 2, 1.0).unwrap();
        assert_eq!(p.d_avg, 3.0);
        assert_eq!(p.d_f, vec![0.0]);
    }

    #[test]
    fn single_node_profile() {
        let t = Topology::from_edges(1, &[]);
        let p = measure_profile(&t, 0, 0.5).unwrap();
        assert_eq!(p.d_avg, 0.0);
        assert!(p.d_f.is_empty());
        assert_eq!(p.p_broadcast, 0.5);
    }

    #[test]
    fn pooled_ring_profile() {
        let t = Topology::ring(7, 100.0);
        let p = measure_network_profile(&t, 1.0).unwrap();
        assert_eq!(p.d_avg, 2.0);
        assert_eq!(p.d_f, vec![1.0, 1.0]);
        assert_eq!(network_eccentricity(&t), 3);
    }
}
