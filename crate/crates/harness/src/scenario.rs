use overhead_core::Protocol;
use overhead_sim::netsim::rng::derive_seed;
use overhead_sim::netsim::traffic::generate_flows;
use overhead_sim::{Ledger, MobilityConfig, RadioConfig, SimConfig, Simulation, Topology};
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::HarnessError;
use crate::metrics::{Metrics, RunMetrics};

/// What a scenario's x column records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    Pause,
    Nodes,
    /// Mean hop count of delivered packets, measured per run.
    Hops,
}

impl XAxis {
    fn value(self, cfg: &ScenarioConfig, ledger: &Ledger) -> f64 {
        match self {
            XAxis::Pause => cfg.pause,
            XAxis::Nodes => cfg.nodes as f64,
            XAxis::Hops => ledger.mean_hops().unwrap_or(f64::NAN),
        }
    }
}

/// Builds the simulation for one seed. Placement, mobility and traffic
/// depend only on the seed, so every protocol sees the same network.
pub fn build_simulation(cfg: &ScenarioConfig, protocol: Protocol, seed: u64) -> Result<Simulation, HarnessError> {
    cfg.validate()?;
    let topology = Topology::generate(cfg.nodes, cfg.width, cfg.height, cfg.radio_range, seed);
    let hi = cfg.flow_start_max.min(cfg.duration);
    let lo = cfg.flow_start_min.min(hi);
    let flows = generate_flows(cfg.nodes, cfg.flows, cfg.packet_size, 1.0 / cfg.packet_rate, (lo, hi), cfg.duration, seed);
    let sim_cfg = SimConfig {
        constants: cfg.constants_for(protocol)?,
        router: cfg.router,
        radio: RadioConfig { range: cfg.radio_range, link_rate_bps: cfg.link_rate, per_hop_delay: cfg.per_hop_delay },
        mobility: MobilityConfig::constant(cfg.speed, cfg.pause),
        duration: cfg.duration,
        seed,
        trace: false,
    };
    Ok(Simulation::new(sim_cfg, topology, flows)?)
}

/// One run; returns its metrics and full ledger.
pub fn run_once(cfg: &ScenarioConfig, protocol: Protocol, seed: u64, x: XAxis) -> Result<(RunMetrics, Ledger), HarnessError> {
    let mut sim = build_simulation(cfg, protocol, seed)?;
    let interval = sim.config().constants.hello_interval;
    let ledger = sim.run().clone();
    let metrics = RunMetrics::from_ledger(protocol, &cfg.name, x.value(cfg, &ledger), seed, &ledger, interval);
    Ok((metrics, ledger))
}

/// `cfg.runs` runs of `cfg.protocol`, seeded from `cfg.seed`, averaged.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Metrics, HarnessError> {
    run_scenario_with(cfg, XAxis::Pause)
}

pub fn run_scenario_with(cfg: &ScenarioConfig, x: XAxis) -> Result<Metrics, HarnessError> {
    cfg.validate()?;
    let runs = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|i| run_once(cfg, cfg.protocol, derive_seed(cfg.seed, i), x).map(|(m, _)| m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Metrics::aggregate(runs))
}

/// The three desk-scale experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeskScenario {
    /// Route requests at moderate mobility.
    Hops,
    /// Pause-time sweep at high speed.
    Mobility,
    /// Node-count sweep at a short pause.
    Scale,
}

impl DeskScenario {
    pub fn from_index(i: u32) -> Option<Self> {
        match i {
            1 => Some(DeskScenario::Hops),
            2 => Some(DeskScenario::Mobility),
            3 => Some(DeskScenario::Scale),
            _ => None,
        }
    }

    pub fn x_axis(self) -> XAxis {
        match self {
            DeskScenario::Hops => XAxis::Hops,
            DeskScenario::Mobility => XAxis::Pause,
            DeskScenario::Scale => XAxis::Nodes,
        }
    }

    /// Scenario configurations, one per sweep point.
    pub fn points(self, seed: u64, runs: usize) -> Vec<ScenarioConfig> {
        let base = ScenarioConfig { seed, runs, ..ScenarioConfig::default() };
        match self {
            DeskScenario::Hops => vec![ScenarioConfig {
                name: "scenario1".into(),
                width: 400.0,
                height: 300.0,
                nodes: 20,
                speed: 5.0,
                pause: 2.0,
                duration: 60.0,
                flows: 6,
                ..base
            }],
            DeskScenario::Mobility => [0.0, 30.0, 60.0, 120.0]
                .into_iter()
                .map(|pause| ScenarioConfig {
                    name: "scenario2".into(),
                    nodes: 20,
                    speed: 15.0,
                    pause,
                    duration: 120.0,
                    flows: 6,
                    ..base.clone()
                })
                .collect(),
            DeskScenario::Scale => [5, 10, 20, 30]
                .into_iter()
                .map(|nodes| ScenarioConfig {
                    name: "scenario3".into(),
                    nodes,
                    speed: 15.0,
                    pause: 2.0,
                    duration: 120.0,
                    flows: 6,
                    ..base.clone()
                })
                .collect(),
        }
    }
}

/// Every run of a desk scenario for the given protocols, in
/// (protocol, point, run) order.
pub fn desk(scenario: DeskScenario, protocols: &[Protocol], seed: u64, runs: usize) -> Result<Vec<RunMetrics>, HarnessError> {
    let points = scenario.points(seed, runs);
    let jobs: Vec<(Protocol, &ScenarioConfig, u64)> = protocols
        .iter()
        .flat_map(|&p| points.iter().flat_map(move |c| (0..c.runs as u64).map(move |i| (p, c, derive_seed(c.seed, i)))))
        .collect();
    jobs.into_par_iter()
        .map(|(p, c, s)| run_once(c, p, s, scenario.x_axis()).map(|(m, _)| m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_pair_delivers_everything() {
        let cfg = ScenarioConfig {
            width: 100.0,
            height: 100.0,
            nodes: 2,
            duration: 20.0,
            flows: 1,
            runs: 1,
            ..ScenarioConfig::default()
        };
        for p in Protocol::ALL {
            let m = run_scenario(&ScenarioConfig { protocol: p, ..cfg.clone() }).unwrap();
            assert!(m.data_sent > 0.0);
            assert_eq!(m.data_delivered, m.data_sent, "{p}");
            assert_eq!(m.rerr, 0.0);
        }
    }

    #[test]
    fn same_seed_same_metrics() {
        let cfg = ScenarioConfig { nodes: 10, speed: 10.0, duration: 20.0, flows: 3, runs: 2, ..ScenarioConfig::default() };
        assert_eq!(run_scenario(&cfg).unwrap(), run_scenario(&cfg).unwrap());
    }
}
