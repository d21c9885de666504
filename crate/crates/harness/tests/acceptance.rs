//! Exit criteria for the workspace. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use overhead_core::*;
use overhead_harness::oracle::{flooding_oracle, network_flood_oracle};
use overhead_harness::output::write_csv;
use overhead_harness::scenario::{desk, run_scenario, DeskScenario};
use overhead_harness::{compare_model_vs_sim, RunMetrics, ScenarioConfig};
use overhead_sim::fixtures::{self, SecondDiscovery};
use overhead_sim::netsim::profile::network_eccentricity;
use overhead_sim::netsim::mobility::NodeMotion;
use overhead_sim::{
    measure_network_profile, measure_profile, EventQueue, MobilityConfig, Point, RadioConfig, RandomWaypoint,
    Topology,
};
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const RUNS: usize = 5;

/// Outcome of one criterion: failures list what did not hold.
#[derive(Default)]
struct Check {
    checks: usize,
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Check {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn close(&mut self, label: &str, expected: f64, actual: f64) {
        let rel = (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        let ok = if expected == 0.0 { actual == 0.0 } else { rel <= 1e-12 };
        self.expect(ok, format!("{label}: expected {expected}, got {actual}"));
    }

    fn within(&mut self, budget: Duration, started: Instant) {
        let took = started.elapsed();
        self.expect(took < budget, format!("took {took:.2?}, budget {budget:.0?}"));
    }
}

fn profile(p: f64, d_avg: f64, d_f: &[f64]) -> NetworkProfile {
    NetworkProfile::new(p, d_avg, d_f.to_vec()).expect("valid profile")
}

fn ttl_schedule(ttls: &[u32]) -> RingSchedule {
    RingSchedule {
        protocol: Protocol::Dymo,
        ttls: ttls.to_vec(),
        timeouts: vec![0.1; ttls.len()],
        retries_at_max: 0,
        max_ttl_cap: *ttls.iter().max().expect("non-empty"),
    }
}

fn monitor_event(active: f64, hops: u32) -> MaintenanceEvent {
    MaintenanceEvent { link_active_time: active, route_hop_count: hops, ..MaintenanceEvent::default() }
}

fn criterion_1() -> Check {
    let started = Instant::now();
    let mut c = Check::default();
    let r = |x: Result<f64, ModelError>| x.expect("example inputs are valid");

    c.close("flood h=1", 4.0, r(blind_flood_cost(1, &profile(1.0, 4.0, &[]))));
    c.close("flood h=2", 4.0, r(blind_flood_cost(2, &profile(0.5, 4.0, &[2.0]))));
    c.close("flood h=3", 6.0, r(blind_flood_cost(3, &profile(1.0, 2.0, &[1.0, 1.0]))));

    c.close("ring ttl=1", 2.0, r(ring_energy_cost(1, &profile(1.0, 2.0, &[]))));
    c.close("ring ttl=3", 6.0, r(ring_energy_cost(3, &profile(1.0, 2.0, &[1.0, 1.0]))));
    let line = profile(1.0, 2.0, &[1.0; 4]);
    c.close("ring ttl=5", 10.0, r(ring_energy_cost(5, &line)));

    let rings = ttl_schedule(&[1, 3, 5]);
    c.close("ers none", 18.0, r(ers_rreq_energy_cost(&rings, &DiscoveryOutcome::no_reply(), &line)));
    c.close("ers ring 1", 2.0, r(ers_rreq_energy_cost(&rings, &DiscoveryOutcome::reply_at(1, vec![1]), &line)));
    c.close("ers ring 2", 8.0, r(ers_rreq_energy_cost(&rings, &DiscoveryOutcome::reply_at(2, vec![2]), &line)));

    c.close("rd ring 2", 10.0, r(rd_energy_cost(&rings, &DiscoveryOutcome::reply_at(2, vec![2]), &line)));
    c.close("rd ring 1", 3.0, r(rd_energy_cost(&rings, &DiscoveryOutcome::reply_at(1, vec![1]), &line)));
    c.close("rd none", 18.0, r(rd_energy_cost(&rings, &DiscoveryOutcome::no_reply(), &line)));

    let aodv = ProtocolConstants::aodv();
    let dsr = ProtocolConstants::dsr();
    let dymo = ProtocolConstants::dymo();
    c.close("hello 10s x3", 30.0, r(link_monitor_cost(&monitor_event(10.0, 3), &aodv)));
    c.close("hello idle", 0.0, r(link_monitor_cost(&monitor_event(0.0, 3), &aodv)));
    c.close("hello dsr", 0.0, r(link_monitor_cost(&monitor_event(10.0, 3), &dsr)));

    c.close("llr ttl (3,4)", 5.0, f64::from(llr_ttl(3, 4, &aodv)));
    c.close("llr ttl (1,8)", 6.0, f64::from(llr_ttl(1, 8, &aodv)));
    c.close("llr ttl (0,0)", 2.0, f64::from(llr_ttl(0, 0, &aodv)));

    c.close("llr energy ttl=1", 3.0, r(llr_energy_cost(1, &profile(1.0, 3.0, &[]))));
    c.close("llr energy ttl=5", 10.0, r(llr_energy_cost(5, &line)));
    c.close("llr energy p=0", 0.0, r(llr_energy_cost(5, &profile(0.0, 2.0, &[1.0; 4]))));

    let dymo_event = MaintenanceEvent { rerr_transmissions: 4, ..monitor_event(30.0, 1) };
    c.close("rm dymo", 34.0, r(rm_energy_cost(Protocol::Dymo, &dymo_event, &line, &dymo)));
    // llr ttl 5 on the line profile costs 10
    let aodv_event = MaintenanceEvent {
        llr: Some(LlrRecord { min_repair_ttl: 3, hops_to_sender: 4, succeeded: true }),
        ..monitor_event(20.0, 1)
    };
    c.close("rm aodv", 30.0, r(rm_energy_cost(Protocol::Aodv, &aodv_event, &line, &aodv)));
    let dsr_event = MaintenanceEvent {
        rerr_transmissions: 2,
        ps: Some(PsRecord { nodes_checked_to_salvor: 3, nodes_checked_to_origin: 5, succeeded: true }),
        ..MaintenanceEvent::default()
    };
    c.close("rm dsr", 5.0, r(rm_energy_cost(Protocol::Dsr, &dsr_event, &line, &dsr)));

    let dsr_sched = build_schedule(&dsr).expect("default constants");
    c.close("dsr rd ring 1", 0.030, r(rd_time_cost_dsr(&dsr_sched, &DiscoveryOutcome::reply_at(1, vec![1]), &dsr)));
    c.close("dsr rd ring 3", 0.210, r(rd_time_cost_dsr(&dsr_sched, &DiscoveryOutcome::reply_at(3, vec![1]), &dsr)));
    c.close("dsr rd none", 0.450, r(rd_time_cost_dsr(&dsr_sched, &DiscoveryOutcome::no_reply(), &dsr)));

    let ladder = RingSchedule { protocol: Protocol::Aodv, ..ttl_schedule(&[2, 4, 6, 35]) };
    c.close("aodv rd ring 1", 0.320, r(rd_time_cost_aodv_dymo(&ladder, &DiscoveryOutcome::reply_at(1, vec![1]), &aodv)));
    c.close("aodv rd ring 2", 0.800, r(rd_time_cost_aodv_dymo(&ladder, &DiscoveryOutcome::reply_at(2, vec![1]), &aodv)));
    c.close("aodv rd none", 4.400, r(rd_time_cost_aodv_dymo(&ladder, &DiscoveryOutcome::no_reply(), &aodv)));

    c.close("rm time aodv A", 0.560, r(rm_time_cost(Protocol::Aodv, &aodv_event, &aodv)));
    let ps_ok = MaintenanceEvent { ps: Some(PsRecord { nodes_checked_to_salvor: 3, ..dsr_event.ps.unwrap() }), ..dsr_event };
    c.close("rm time dsr salvage", 0.003, r(rm_time_cost(Protocol::Dsr, &ps_ok, &dsr)));
    let expired = MaintenanceEvent { rerr_receive_time: 0.12, retries_expired: true, ..MaintenanceEvent::default() };
    c.close("rm time dymo expired", 0.120, r(rm_time_cost(Protocol::Dymo, &expired, &dymo)));

    c.close("llr time ttl=5", 0.560, llr_time_cost(5, &aodv));
    c.close("llr time ttl=2", 0.320, llr_time_cost(2, &aodv));
    c.close("llr time instant", 0.0, llr_time_cost(5, &ProtocolConstants { node_traversal_time: 0.0, ..aodv.clone() }));

    let b = aggregate_costs(10.0, 34.0, 0.32, 0.12).expect("non-negative");
    c.close("aggregate e_total", 44.0, b.e_total);
    c.close("aggregate t_total", 0.44, b.t_total);
    c.close("aggregate c_total", 19.36, b.c_total);
    let z = aggregate_costs(0.0, 0.0, 0.0, 0.0).expect("non-negative");
    c.close("aggregate zero", 0.0, z.c_total);
    c.close("aggregate rd only", 79.2, aggregate_costs(18.0, 0.0, 4.4, 0.0).expect("non-negative").c_total);

    c.close("beb 1", 0.030, beb_timeout(1, 0.030).expect("i >= 1"));
    c.close("beb 2", 0.060, beb_timeout(2, 0.030).expect("i >= 1"));
    c.close("beb 4", 0.240, beb_timeout(4, 0.030).expect("i >= 1"));

    // Substrate arithmetic.
    let chain = Topology::chain(3, 100.0, 150.0);
    let pc = measure_profile(&chain, 0, 1.0).expect("profile");
    c.close("chain d_avg", 4.0 / 3.0, pc.d_avg);
    c.expect(pc.d_f == vec![1.0], format!("chain d_f {:?}", pc.d_f));
    let k4 = measure_profile(&Topology::complete(4, 100.0), 2, 1.0).expect("profile");
    c.close("k4 d_avg", 3.0, k4.d_avg);
    c.expect(k4.d_f == vec![0.0], format!("k4 d_f {:?}", k4.d_f));
    let single = measure_profile(&Topology::chain(1, 100.0, 150.0), 0, 1.0).expect("profile");
    c.expect(single.d_avg == 0.0 && single.d_f.is_empty(), "single node profile is empty");
    c.expect(Topology::generate(1, 100.0, 100.0, 250.0, 3).degree(0) == 0, "lone node has no edges");
    let pair = Topology::from_positions(vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0)], 250.0, 100.0, 100.0);
    c.expect(pair.neighbors(0) == [1] && pair.neighbors(1) == [0], "pair in range has one symmetric edge");
    let a = Topology::generate(50, 1000.0, 1000.0, 250.0, 7);
    let b = Topology::generate(50, 1000.0, 1000.0, 250.0, 7);
    c.expect(a.adjacency() == b.adjacency(), "same seed gives the same adjacency");

    let mut walk = Topology::from_positions(vec![Point::new(0.0, 0.0)], 250.0, 100.0, 100.0);
    let motion = NodeMotion { target: Point::new(3.0, 4.0), speed: 5.0, pause_until: 0.0 };
    let mut rwp = RandomWaypoint::with_states(MobilityConfig::constant(5.0, 100.0), vec![motion], 1);
    rwp.step(&mut walk, 0.0, 1.0);
    c.expect(walk.position(0) == Point::new(3.0, 4.0), format!("waypoint arrival at {:?}", walk.position(0)));
    let mut frozen = Topology::generate(5, 100.0, 100.0, 50.0, 2);
    let before = frozen.positions().to_vec();
    let mut still = RandomWaypoint::new(MobilityConfig::constant(0.0, 0.0), &frozen, 2);
    for k in 0..50 {
        still.step(&mut frozen, k as f64 * 0.1, 0.1);
    }
    c.expect(frozen.positions() == before.as_slice(), "zero speed leaves nodes in place");

    let mut q = EventQueue::new();
    q.schedule(1.0, "first").expect("future");
    q.schedule(1.0, "second").expect("future");
    c.expect(q.advance().map(|e| e.payload) == Some("first"), "equal times dequeue in insertion order");
    c.expect(q.advance().map(|e| e.payload) == Some("second"), "equal times dequeue in insertion order");
    c.expect(q.advance().is_none(), "empty queue signals the end");
    let mut q = EventQueue::new();
    q.schedule(0.5, 'a').expect("future");
    q.schedule(0.2, 'b').expect("future");
    c.expect(q.advance().map(|e| e.payload) == Some('b'), "earlier event first");
    c.close("serialization 512 B", 0.002048, RadioConfig::default().serialization(512));

    let chain3 = flooding_oracle(&chain, 0, 1.0, 100, 1);
    c.close("oracle chain", 3.0, chain3.mean);
    c.close("oracle chain stderr", 0.0, chain3.stderr);
    c.close("oracle p=0", 1.0, flooding_oracle(&chain, 0, 0.0, 100, 1).mean);
    c.close("oracle k4", 4.0, flooding_oracle(&Topology::complete(4, 100.0), 0, 1.0, 100, 1).mean);

    let mut csv = Vec::new();
    write_csv(&[], &mut csv).expect("in-memory write");
    c.expect(String::from_utf8_lossy(&csv).lines().count() == 1, "empty metrics give a header-only file");
    let fake: Vec<RunMetrics> = desk(DeskScenario::Mobility, &Protocol::ALL, 1, 1)
        .expect("desk runs")
        .into_iter()
        .cycle()
        .take(75)
        .collect();
    let mut csv = Vec::new();
    write_csv(&fake, &mut csv).expect("in-memory write");
    c.expect(String::from_utf8_lossy(&csv).lines().count() == 76, "75 rows plus header");

    let static_pair = ScenarioConfig {
        width: 100.0,
        height: 100.0,
        nodes: 2,
        speed: 0.0,
        duration: 20.0,
        flows: 1,
        runs: 1,
        ..ScenarioConfig::default()
    };
    let m = run_scenario(&static_pair).expect("static pair");
    c.expect(m.data_delivered == m.data_sent && m.rerr == 0.0, "static pair delivers all without errors");
    c.expect(m == run_scenario(&static_pair).expect("static pair"), "same configuration gives the same metrics");
    let mut again = Vec::new();
    write_csv(&fake, &mut again).expect("in-memory write");
    c.expect(csv == again, "re-emitting the same rows gives the same bytes");

    let (mut topo, mut rwp) = (
        Topology::from_positions(vec![Point::new(0.0, 0.0)], 250.0, 100.0, 100.0),
        RandomWaypoint::with_states(
            MobilityConfig::constant(5.0, 1000.0),
            vec![NodeMotion { target: Point::new(3.0, 4.0), speed: 5.0, pause_until: 0.0 }],
            1,
        ),
    );
    for k in 0..50 {
        rwp.step(&mut topo, f64::from(k), 1.0);
    }
    c.expect(topo.position(0) == Point::new(3.0, 4.0), "a pause as long as the run freezes the node");

    criterion_1_sim(&mut c);
    c.note(format!("{} checks", c.checks));
    c.within(Duration::from_secs(1), started);
    c
}

/// Worked examples that need a short simulator run.
fn criterion_1_sim(c: &mut Check) {
    let chain = || Topology::chain(3, 100.0, 150.0);

    let mut s = fixtures::traced(Protocol::Aodv, chain(), 5.0);
    s.inject_data(1.0, 0, 2, 512).expect("fixture nodes exist");
    s.inject_data(2.0, 0, 2, 512).expect("fixture nodes exist");
    s.run_until(1.9);
    let before = s.ledger().e2ed_sum;
    let l = s.run().clone();
    let hop = s.config().radio.latency(512);
    c.close("e2ed over a known 2-hop route", 2.0 * hop, l.e2ed_sum - before);

    let mut s = fixtures::traced(Protocol::Aodv, chain(), 5.0);
    s.inject_data(1.0, 1, 1, 512).expect("fixture nodes exist");
    let l = s.run();
    c.expect((l.data_delivered, l.transmissions) == (1, 0), "self-addressed data is free");

    let mut s = fixtures::traced(Protocol::Aodv, Topology::chain(4, 100.0, 150.0), 5.0);
    for k in 0..5 {
        s.inject_data(1.0 + f64::from(k) * 0.01, 0, 3, 512).expect("fixture nodes exist");
    }
    let l = s.run();
    c.expect(l.discoveries.len() == 1 && l.data_delivered == 5, "queued packets share one discovery");

    let (_, mut s) = fixtures::second_discovery(Protocol::Aodv);
    let rreq = s.ledger().rreq;
    s.inject_data(3.0, 0, 3, 512).expect("fixture nodes exist");
    c.expect(s.run().rreq == rreq, "a table hit sends no request");

    let mut s = fixtures::traced(Protocol::Aodv, chain(), 30.0);
    c.expect(s.run().hello == 0, "no active routes, no beacons");
    let mut s = fixtures::traced(Protocol::Aodv, chain(), 30.0);
    for k in 0..40 {
        s.inject_data(1.0 + f64::from(k) * 0.25, 0, 2, 512).expect("fixture nodes exist");
    }
    let l = s.run();
    c.expect(l.hello > 0 && l.hello_mismatches(1.0).is_empty(), "beacons match active link time");

    let apart = fixtures::placed(&[(0.0, 0.0), (900.0, 0.0)], 250.0);
    let mut s = fixtures::traced(Protocol::Aodv, apart.clone(), 10.0);
    s.inject_data(1.0, 0, 1, 512).expect("fixture nodes exist");
    let l = s.run();
    c.expect(l.rreq > 0 && l.deliveries == 0, "an isolated node's broadcasts reach nobody");
    let l = fixtures::two_path(Protocol::Dsr).run().clone();
    c.expect(l.link_failures >= 1, "unicast to a departed neighbour reports a link failure");

    let r = compare_model_vs_sim(&chain(), 0, 2, Protocol::Dymo, 1.0, 1).expect("chain");
    c.close("chain compare sim rreq", 2.0, r.quantities[0].simulated);
    c.close("chain compare model rreq", 8.0 / 3.0, r.quantities[0].analytic);
    let r = compare_model_vs_sim(&Topology::complete(4, 100.0), 0, 3, Protocol::Aodv, 1.0, 1).expect("k4");
    c.close("k4 compare model", 3.0, r.quantities[0].analytic);
    c.close("k4 compare sim", 3.0, r.quantities[0].simulated);
    let r = compare_model_vs_sim(&apart, 0, 1, Protocol::Dymo, 1.0, 1).expect("pair");
    c.expect(r.outcome.result == DiscoveryResult::NoReply, "isolated pair takes the no-reply branch");
}

fn criterion_2() -> Check {
    let started = Instant::now();
    let mut c = Check::default();
    for seed in 1..=5u64 {
        let topo = Topology::generate(20, 1000.0, 1000.0, 250.0, seed);
        let h = network_eccentricity(&topo);
        for (p, tol) in [(1.0, 0.15), (0.7, 0.25), (0.4, 0.25)] {
            let prof = measure_network_profile(&topo, p).expect("profile");
            let analytic = if h == 0 { 0.0 } else { blind_flood_cost(h, &prof).expect("profile covers h") };
            let oracle = network_flood_oracle(&topo, p, 10_000, seed).mean;
            let rel = (oracle - analytic).abs() / analytic.max(1.0);
            c.note(format!("seed {seed} p={p}: oracle {oracle:.3} model {analytic:.3} err {:.1}%", rel * 100.0));
            c.expect(rel <= tol, format!("seed {seed} p={p}: error {:.1}% over {:.0}%", rel * 100.0, tol * 100.0));
        }
    }
    // Constructed graphs where every node at a depth has the same fan-out.
    let ring = Topology::ring(7, 100.0);
    let ring_model = blind_flood_cost(network_eccentricity(&ring), &measure_network_profile(&ring, 1.0).expect("profile"))
        .expect("profile covers h");
    let ring_oracle = flooding_oracle(&ring, 0, 1.0, 10_000, 1).mean - 1.0;
    c.expect(ring_model == ring_oracle, format!("ring: model {ring_model} oracle {ring_oracle}"));
    let k4 = Topology::complete(4, 100.0);
    let k4_model = blind_flood_cost(1, &measure_profile(&k4, 0, 1.0).expect("profile")).expect("h=1");
    let k4_oracle = flooding_oracle(&k4, 0, 1.0, 10_000, 1).mean - 1.0;
    c.expect(k4_model == k4_oracle, format!("k4: model {k4_model} oracle {k4_oracle}"));
    // Full binary tree of depth 3: root degree 2, every layer doubles.
    let edges: Vec<(usize, usize)> = (1..15).map(|v| ((v - 1) / 2, v)).collect();
    let tree = Topology::from_edges(15, &edges);
    let measured = measure_profile(&tree, 0, 1.0).expect("profile");
    let rooted = NetworkProfile::new(1.0, tree.degree(0) as f64, measured.d_f).expect("profile");
    let tree_model = blind_flood_cost(3, &rooted).expect("profile covers h");
    let tree_oracle = flooding_oracle(&tree, 0, 1.0, 10_000, 1).mean - 1.0;
    c.expect(tree_model == tree_oracle, format!("tree: model {tree_model} oracle {tree_oracle}"));
    c.within(Duration::from_secs(30), started);
    c
}

fn criterion_3() -> Check {
    let mut c = Check::default();
    let aodv = build_schedule(&ProtocolConstants::aodv()).expect("defaults");
    let dymo = build_schedule(&ProtocolConstants::dymo()).expect("defaults");
    let dsr = build_schedule(&ProtocolConstants::dsr()).expect("defaults");
    c.expect(aodv.ttls == [2, 4, 6, 35, 35, 35], format!("aodv ttls {:?}", aodv.ttls));
    c.expect(dymo.ttls == [2, 4, 6, 10, 10, 10, 10], format!("dymo ttls {:?}", dymo.ttls));
    c.expect(dsr.ttls == [1, 255, 255, 255], format!("dsr ttls {:?}", dsr.ttls));
    let tau = 0.030;
    c.expect(dsr.timeouts == [tau, tau, 2.0 * tau, 4.0 * tau], format!("dsr timeouts {:?}", dsr.timeouts));
    for i in 1..=8u32 {
        let t = beb_timeout(i, tau).expect("i >= 1");
        let next = beb_timeout(i + 1, tau).expect("i >= 1");
        c.expect(next == 2.0 * t, format!("beb {i} -> {}: {t} then {next}", i + 1));
    }
    c
}

fn criterion_4() -> Check {
    let started = Instant::now();
    let mut c = Check::default();
    let once = |f: &dyn Fn() -> overhead_sim::Simulation| {
        let mut a = f();
        let mut b = f();
        a.run();
        b.run();
        (a.ledger().clone(), a.trace() == b.trace())
    };

    let (l, same) = once(&|| fixtures::chain_discovery(Protocol::Dymo));
    c.expect(same, "chain trace repeats");
    c.expect((l.rreq, l.rrep, l.data_delivered) == (2, 2, 1), format!("chain: rreq {} rrep {}", l.rreq, l.rrep));

    let (l, same) = once(&|| fixtures::unreachable_target(Protocol::Dymo));
    c.expect(same, "unreachable trace repeats");
    c.expect((l.rreq, l.rrep) == (14, 0), format!("unreachable: rreq {} rrep {}", l.rreq, l.rrep));

    let (aodv, _) = fixtures::second_discovery(Protocol::Aodv);
    let (dymo, _) = fixtures::second_discovery(Protocol::Dymo);
    c.expect(aodv == SecondDiscovery { rreq: 1, rrep: 1 }, format!("aodv cached reply spent {aodv:?}"));
    c.expect(dymo == SecondDiscovery { rreq: 5, rrep: 3 }, format!("dymo on the same chain spent {dymo:?}"));

    let (l, same) = once(&|| fixtures::local_repair_grid(Protocol::Aodv));
    c.expect(same, "grid trace repeats");
    let sources = l.discoveries.iter().filter(|d| d.node == 0).count();
    c.expect(
        (l.llr_attempts, l.llr_successes, l.llr_rreq, l.rerr, sources) == (1, 1, 6, 0, 1),
        format!(
            "grid: repairs {}/{} repair rreq {} rerr {} source discoveries {sources}",
            l.llr_successes, l.llr_attempts, l.llr_rreq, l.rerr
        ),
    );
    let mut s = fixtures::local_repair_grid(Protocol::Aodv);
    s.run_until(5.0);
    let (rreq, rrep) = (s.ledger().rreq, s.ledger().rrep);
    let l = s.run();
    c.expect(
        (l.rreq - rreq, l.rrep - rrep) == (6, 3),
        format!("grid: repair spent {} rreq {} rrep", l.rreq - rreq, l.rrep - rrep),
    );

    let (l, same) = once(&|| fixtures::two_path(Protocol::Dsr));
    c.expect(same, "two-path trace repeats");
    c.expect(
        (l.rreq, l.rrep, l.rerr, l.salvaged, l.data_delivered) == (5, 6, 1, 1, 16),
        format!("two-path: rreq {} rrep {} rerr {} salvaged {} delivered {}", l.rreq, l.rrep, l.rerr, l.salvaged, l.data_delivered),
    );
    c.within(Duration::from_secs(5), started);
    c
}

/// Every desk run, per scenario and seed, in emission order.
struct DeskBatch {
    runs: Vec<(DeskScenario, u64, Vec<RunMetrics>)>,
    elapsed: Duration,
}

fn desk_batch() -> &'static DeskBatch {
    static BATCH: OnceLock<DeskBatch> = OnceLock::new();
    BATCH.get_or_init(|| {
        let started = Instant::now();
        let mut runs = Vec::new();
        for scenario in [DeskScenario::Hops, DeskScenario::Mobility, DeskScenario::Scale] {
            for seed in SEEDS {
                runs.push((scenario, seed, desk(scenario, &Protocol::ALL, seed, RUNS).expect("desk runs")));
            }
        }
        DeskBatch { runs, elapsed: started.elapsed() }
    })
}

fn protocol_mean(rows: &[RunMetrics], protocol: Protocol, f: impl Fn(&RunMetrics) -> Option<f64>) -> f64 {
    let v: Vec<f64> = rows.iter().filter(|r| r.protocol == protocol).filter_map(f).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn criterion_5() -> Check {
    let mut c = Check::default();
    let batch = desk_batch();
    let rows = |s: DeskScenario, seed: u64| -> &[RunMetrics] {
        &batch.runs.iter().find(|(sc, sd, _)| *sc == s && *sd == seed).expect("batch covers every seed").2
    };
    let (mut rreq_wins, mut delay_wins, mut load_wins, mut scale_wins) = (0, 0, 0, 0);
    for seed in SEEDS {
        let hops = rows(DeskScenario::Hops, seed);
        let rreq = |p| protocol_mean(hops, p, |r| Some(r.rreq as f64));
        let (a, d, y) = (rreq(Protocol::Aodv), rreq(Protocol::Dsr), rreq(Protocol::Dymo));
        rreq_wins += usize::from(y > a && y > d);
        c.note(format!("hops seed {seed}: rreq aodv {a:.1} dsr {d:.1} dymo {y:.1}"));

        let mobility = rows(DeskScenario::Mobility, seed);
        let e2ed = |p| protocol_mean(mobility, p, |r| r.e2ed) * 1e3;
        let (a, d, y) = (e2ed(Protocol::Aodv), e2ed(Protocol::Dsr), e2ed(Protocol::Dymo));
        delay_wins += usize::from(a > d && a > y && y < d);
        c.note(format!("mobility seed {seed}: e2ed ms aodv {a:.3} dsr {d:.3} dymo {y:.3}"));
        let nrl = |p| protocol_mean(mobility, p, |r| r.nrl);
        let (a, d, y) = (nrl(Protocol::Aodv), nrl(Protocol::Dsr), nrl(Protocol::Dymo));
        load_wins += usize::from(d < a && d < y);
        c.note(format!("mobility seed {seed}: nrl aodv {a:.3} dsr {d:.3} dymo {y:.3}"));

        let scale = rows(DeskScenario::Scale, seed);
        let nrl = |p| protocol_mean(scale, p, |r| r.nrl);
        let (a, d, y) = (nrl(Protocol::Aodv), nrl(Protocol::Dsr), nrl(Protocol::Dymo));
        scale_wins += usize::from(y < a && y < d);
        c.note(format!("scale seed {seed}: nrl aodv {a:.3} dsr {d:.3} dymo {y:.3}"));
    }
    c.expect(rreq_wins >= 4, format!("DYMO sends the most requests in {rreq_wins}/5 seeds, need 4"));
    c.expect(delay_wins >= 3, format!("AODV slowest and DYMO fastest in {delay_wins}/5 seeds, need 3"));
    c.expect(load_wins >= 3, format!("DSR lightest load under mobility in {load_wins}/5 seeds, need 3"));
    c.expect(scale_wins >= 3, format!("DYMO lightest load across sizes in {scale_wins}/5 seeds, need 3"));
    c.within(Duration::from_secs(300), Instant::now() - batch.elapsed);
    c
}

fn criterion_6() -> Check {
    let mut c = Check::default();
    let batch = desk_batch();
    let mut runs = 0;
    for (scenario, seed, rows) in &batch.runs {
        for r in rows {
            runs += 1;
            c.expect(
                r.violations.is_empty(),
                format!("{scenario:?} seed {} {}: {:?}", r.seed, r.protocol, r.violations.first()),
            );
            c.expect(r.hello_mismatches == 0, format!("{scenario:?} seed {} {}: {} beacon mismatches", r.seed, r.protocol, r.hello_mismatches));
            c.expect(r.data_delivered <= r.data_sent, format!("{scenario:?} seed {}: delivered more than sent", r.seed));
        }
        let mut first = Vec::new();
        write_csv(rows, &mut first).expect("in-memory write");
        let again = desk(*scenario, &Protocol::ALL, *seed, RUNS).expect("desk runs");
        let mut second = Vec::new();
        write_csv(&again, &mut second).expect("in-memory write");
        c.expect(first == second, format!("{scenario:?} seed {seed}: CSV differs between executions"));
    }
    c.note(format!("{runs} runs checked"));
    c
}

fn criterion_7() -> Check {
    let mut c = Check::default();
    let constants = ProtocolConstants::aodv();
    let schedule = build_schedule(&constants).expect("defaults");
    let rings = schedule.len();
    let events = (0u32..12, 0u32..20, 0.0f64..5.0, 0.0f64..60.0, 0u32..8, 0usize..=rings).prop_map(
        |(min_repair_ttl, hops_to_sender, rerr_receive_time, link_active_time, route_hop_count, ring)| {
            let outcome = if ring == 0 { DiscoveryOutcome::no_reply() } else { DiscoveryOutcome::reply_at(ring, vec![1]) };
            MaintenanceEvent {
                link_active_time,
                route_hop_count,
                llr: Some(LlrRecord { min_repair_ttl, hops_to_sender, succeeded: false }),
                rerr_receive_time,
                rediscovery: Some(Rediscovery { outcome, schedule: schedule.clone() }),
                ..MaintenanceEvent::default()
            }
        },
    );
    let mut runner = TestRunner::new(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() });
    let result = runner.run(&events, |event| {
        let repaired = MaintenanceEvent {
            llr: event.llr.map(|l| LlrRecord { succeeded: true, ..l }),
            ..event.clone()
        };
        let expired = MaintenanceEvent { retries_expired: true, ..event.clone() };
        let a = rm_time_cost(Protocol::Aodv, &repaired, &constants).expect("case A");
        let b = rm_time_cost(Protocol::Aodv, &expired, &constants).expect("case B");
        let cc = rm_time_cost(Protocol::Aodv, &event, &constants).expect("case C");
        prop_assert!(cc >= b && b >= a, "A {} B {} C {}", a, b, cc);
        Ok(())
    });
    c.expect(result.is_ok(), format!("{result:?}"));
    c.note("100 events");
    c
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 7] = [
        ("worked examples", criterion_1),
        ("flood model against Monte-Carlo oracle", criterion_2),
        ("ring schedules", criterion_3),
        ("hand-traced protocol runs", criterion_4),
        ("protocol orderings at desk scale", criterion_5),
        ("invariants on every desk run", criterion_6),
        ("local repair time ordering", criterion_7),
    ];
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let check = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Check { failures: vec![format!("panicked: {msg}")], ..Check::default() }
        });
        let ok = check.failures.is_empty();
        failed += usize::from(!ok);
        println!("criterion {} {}: {name} ({:.2?})", i + 1, if ok { "PASS" } else { "FAIL" }, started.elapsed());
        for f in &check.failures {
            println!("    failed: {f}");
        }
        if verbose || !ok {
            for n in &check.notes {
                println!("    {n}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
