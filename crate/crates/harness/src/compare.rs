use overhead_core::{
    aggregate_costs, build_schedule, ers_rreq_energy_cost, rd_energy_cost, rd_time_cost, CostBreakdown,
    DiscoveryOutcome, DiscoveryResult, NetworkProfile, Protocol,
};
use overhead_sim::{measure_profile, NodeId, SimConfig, Simulation, Topology};

use crate::error::HarnessError;

/// One compared quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub name: &'static str,
    pub analytic: f64,
    pub simulated: f64,
    /// |simulated - analytic| / max(analytic, 1).
    pub relative_error: f64,
}

impl Quantity {
    fn new(name: &'static str, analytic: f64, simulated: f64) -> Self {
        Self { name, analytic, simulated, relative_error: (simulated - analytic).abs() / analytic.max(1.0) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub protocol: Protocol,
    pub profile: NetworkProfile,
    pub outcome: DiscoveryOutcome,
    pub analytic: CostBreakdown,
    pub quantities: Vec<Quantity>,
}

/// Runs a single discovery from `source` to `target` on a static topology
/// and evaluates the discovery cost model with the measured profile and
/// the outcome the simulator produced.
pub fn compare_model_vs_sim(
    topology: &Topology,
    source: NodeId,
    target: NodeId,
    protocol: Protocol,
    p_broadcast: f64,
    seed: u64,
) -> Result<ComparisonReport, HarnessError> {
    if source >= topology.len() || target >= topology.len() || source == target {
        return Err(HarnessError::Config(format!("bad source/target pair {source} -> {target}")));
    }
    let mut cfg = SimConfig::new(protocol, 1.0, seed);
    cfg.router.p_broadcast = p_broadcast;
    let schedule = build_schedule(&cfg.constants)?;
    let start = 0.5;
    cfg.duration = start + schedule.total_wait() + 1.0;
    let mut sim = Simulation::new(cfg.clone(), topology.clone(), Vec::new())?;
    sim.inject_data(start, source, target, 512)?;
    let ledger = sim.run().clone();
    let record = ledger
        .discoveries
        .iter()
        .find(|d| d.node == source && !d.local_repair)
        .ok_or_else(|| HarnessError::Config("the simulator recorded no discovery".into()))?;
    let outcome = match record.result {
        DiscoveryResult::NoReply => DiscoveryOutcome::no_reply(),
        DiscoveryResult::ReplyAtRing(k) => DiscoveryOutcome::reply_at(k, vec![record.reply_hops.unwrap_or(1).max(1)]),
    };
    let measured = measure_profile(topology, source, p_broadcast)?;
    let max_ttl = schedule.ttls.iter().copied().max().unwrap_or(1) as usize;
    let mut d_f = measured.d_f.clone();
    d_f.resize(max_ttl.max(d_f.len()), 0.0);
    let profile = NetworkProfile::new(p_broadcast, measured.d_avg, d_f)?;
    let rreq_model = ers_rreq_energy_cost(&schedule, &outcome, &profile)?;
    let e_rd = rd_energy_cost(&schedule, &outcome, &profile)?;
    let t_rd = rd_time_cost(protocol, &schedule, &outcome, &cfg.constants)?;
    let analytic = aggregate_costs(e_rd, 0.0, t_rd, 0.0)?;
    let quantities = vec![
        Quantity::new("rreq", rreq_model, ledger.rreq as f64),
        Quantity::new("rd_energy", e_rd, (ledger.rreq + ledger.rrep) as f64),
        Quantity::new("rd_time", t_rd, record.finished - record.started),
    ];
    Ok(ComparisonReport { protocol, profile: measured, outcome, analytic, quantities })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_discovery_report() {
        let chain = Topology::chain(3, 100.0, 150.0);
        let r = compare_model_vs_sim(&chain, 0, 2, Protocol::Dymo, 1.0, 1).unwrap();
        assert_eq!(r.outcome.result, DiscoveryResult::ReplyAtRing(1));
        let rreq = &r.quantities[0];
        assert_eq!(rreq.simulated, 2.0);
        assert!((rreq.analytic - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_first_ring() {
        let k4 = Topology::complete(4, 100.0);
        let r = compare_model_vs_sim(&k4, 0, 3, Protocol::Aodv, 1.0, 1).unwrap();
        assert_eq!(r.outcome.result, DiscoveryResult::ReplyAtRing(1));
        assert_eq!(r.quantities[0].analytic, 3.0);
        assert_eq!(r.quantities[0].simulated, 3.0);
    }

    #[test]
    fn isolated_pair_uses_no_reply_branches() {
        let t = Topology::from_positions(
            vec![overhead_sim::Point::new(0.0, 0.0), overhead_sim::Point::new(900.0, 0.0)],
            250.0,
            1000.0,
            10.0,
        );
        for p in Protocol::ALL {
            let r = compare_model_vs_sim(&t, 0, 1, p, 1.0, 1).unwrap();
            assert_eq!(r.outcome.result, DiscoveryResult::NoReply);
            assert_eq!(r.analytic.e_rd, 0.0);
        }
    }
}
