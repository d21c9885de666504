//! Small hand-traceable networks with scripted traffic and movement.
//!
//! Every fixture is static apart from the moves it schedules, and traces
//! every event.

use overhead_core::Protocol;

use crate::{Point, SimConfig, Simulation, Topology};

/// A traced simulation over `topology` with no background flows.
pub fn traced(protocol: Protocol, topology: Topology, duration: f64) -> Simulation {
    let mut cfg = SimConfig::new(protocol, duration, 1);
    cfg.trace = true;
    Simulation::new(cfg, topology, Vec::new()).expect("fixture configuration is valid")
}

/// Nodes at fixed coordinates in a 1500 m square.
pub fn placed(positions: &[(f64, f64)], range: f64) -> Topology {
    let pts = positions.iter().map(|&(x, y)| Point::new(x, y)).collect();
    Topology::from_positions(pts, range, 1500.0, 1500.0)
}

fn cbr(s: &mut Simulation, start: f64, count: usize, src: usize, dst: usize) {
    for k in 0..count {
        s.inject_data(start + k as f64 * 0.25, src, dst, 512).expect("fixture nodes exist");
    }
}

/// One packet from the head to the tail of a 3-chain.
pub fn chain_discovery(protocol: Protocol) -> Simulation {
    let mut s = traced(protocol, Topology::chain(3, 100.0, 150.0), 5.0);
    s.inject_data(1.0, 0, 2, 512).expect("fixture nodes exist");
    s
}

/// A 3-chain whose tail sits far out of range.
pub fn unreachable_target(protocol: Protocol) -> Simulation {
    let topo = placed(&[(0.0, 0.0), (100.0, 0.0), (1000.0, 0.0)], 150.0);
    let mut s = traced(protocol, topo, 10.0);
    s.inject_data(1.0, 0, 2, 512).expect("fixture nodes exist");
    s
}

/// Control packets spent by a second source on a 4-chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecondDiscovery {
    pub rreq: u64,
    pub rrep: u64,
}

/// Node 1 finds node 3 at t=1; node 0 then looks for node 3 at t=2 through
/// node 1. Returns what node 0's discovery cost and the paused simulation.
pub fn second_discovery(protocol: Protocol) -> (SecondDiscovery, Simulation) {
    let mut s = traced(protocol, Topology::chain(4, 100.0, 150.0), 6.0);
    s.inject_data(1.0, 1, 3, 512).expect("fixture nodes exist");
    s.run_until(2.0);
    let before = s.ledger().clone();
    s.inject_data(2.0, 0, 3, 512).expect("fixture nodes exist");
    s.run_until(2.9);
    let after = s.ledger();
    let spent = SecondDiscovery { rreq: after.rreq - before.rreq, rrep: after.rrep - before.rrep };
    (spent, s)
}

/// 3x3 grid, spacing and range 100 m, carrying 0 -> 7 at 4 packets/s.
///
/// Nodes 3, 4 and 6 start far away so the first route is the snake
/// 0-1-2-5-8-7. They join the grid at t=3, and at t=5.1 node 8 drifts out
/// of range of 7 while staying next to 5.
pub fn local_repair_grid(protocol: Protocol) -> Simulation {
    let mut topo = Topology::grid(3, 3, 100.0, 100.0);
    for (n, p) in [(3, Point::new(1000.0, 1000.0)), (4, Point::new(1000.0, 1300.0)), (6, Point::new(1300.0, 1000.0))] {
        topo.set_position(n, p);
    }
    let mut s = traced(protocol, topo, 12.0);
    cbr(&mut s, 1.0, 40, 0, 7);
    s.schedule_move(3.0, 3, Point::new(0.0, 100.0)).expect("fixture nodes exist");
    s.schedule_move(3.0, 4, Point::new(100.0, 100.0)).expect("fixture nodes exist");
    s.schedule_move(3.0, 6, Point::new(0.0, 200.0)).expect("fixture nodes exist");
    s.schedule_move(5.1, 8, Point::new(215.0, 185.0)).expect("fixture nodes exist");
    s
}

/// S(0) X(1) A(2) B(3) D(4) with links S-X, X-A, X-B, A-D and B-D at 125 m
/// range. 16 packets S -> D from t=1; A leaves at t=2.6.
pub fn two_path(protocol: Protocol) -> Simulation {
    let topo = placed(&[(0.0, 0.0), (100.0, 0.0), (200.0, 65.0), (200.0, -65.0), (300.0, 0.0)], 125.0);
    let mut s = traced(protocol, topo, 6.0);
    cbr(&mut s, 1.0, 16, 0, 4);
    s.schedule_move(2.6, 2, Point::new(200.0, 400.0)).expect("fixture nodes exist");
    s
}
