use std::collections::BTreeSet;

use overhead_core::{build_schedule, Protocol, ProtocolConstants};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::ledger::Ledger;
use crate::netsim::event::EventQueue;
use crate::netsim::mobility::{MobilityConfig, RandomWaypoint};
use crate::netsim::radio::RadioConfig;
use crate::netsim::rng::{stream, Stream};
use crate::netsim::topology::{Point, Topology};
use crate::netsim::traffic::CbrFlow;
use crate::packet::{Data, Dest, Packet, Payload};
use crate::protocols::{Router, RouterConfig, Timer};
use crate::NodeId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub constants: ProtocolConstants,
    pub router: RouterConfig,
    pub radio: RadioConfig,
    pub mobility: MobilityConfig,
    pub duration: f64,
    pub seed: u64,
    pub trace: bool,
}

impl SimConfig {
    pub fn new(protocol: Protocol, duration: f64, seed: u64) -> Self {
        Self {
            constants: ProtocolConstants::for_protocol(protocol),
            router: RouterConfig::default(),
            radio: RadioConfig::default(),
            mobility: MobilityConfig::default(),
            duration,
            seed,
            trace: false,
        }
    }

    pub fn protocol(&self) -> Protocol {
        self.constants.protocol
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Event {
    Deliver { to: NodeId, from: NodeId, packet: Packet },
    LinkFailure { node: NodeId, next_hop: NodeId, packet: Packet },
    Timer { node: NodeId, timer: Timer },
    Mobility,
    Emit { flow: usize },
    Inject { source: NodeId, destination: NodeId, size: usize },
    Move { node: NodeId, to: Point },
}

/// State shared by every node of a run.
pub(crate) struct Core {
    queue: EventQueue<Event>,
    topology: Topology,
    radio: RadioConfig,
    ledger: Ledger,
    fwd_rng: ChaCha8Rng,
    p_broadcast: f64,
    next_uid: u64,
    next_data: u64,
    trace: Option<Vec<String>>,
}

/// A node's handle on the simulator while it reacts to one event.
pub struct Ctx<'a> {
    core: &'a mut Core,
    pub node: NodeId,
    pub now: f64,
}

impl Ctx<'_> {
    /// Transmits one packet. Broadcasts reach every current neighbour; a
    /// unicast to a node out of range comes back as a link failure.
    pub fn send(&mut self, dest: Dest, payload: Payload) {
        let core = &mut *self.core;
        let kind = payload.kind();
        core.ledger.count_tx(kind);
        if let Payload::Rreq(r) = &payload {
            core.ledger.note_rreq_forward(self.node, r.originator, r.id);
            // A wrapped negative TTL lands far above any hop limit.
            if r.ttl > u32::from(u8::MAX) {
                core.ledger.violation(format!("node {} sent request ({}, {}) with ttl {}", self.node, r.originator, r.id, r.ttl));
            }
            if r.local_repair {
                core.ledger.llr_rreq += 1;
            }
        }
        let uid = core.next_uid;
        core.next_uid += 1;
        let latency = core.radio.latency(payload.size());
        let at = self.now + latency;
        let packet = Packet { uid, payload };
        match dest {
            Dest::Broadcast => {
                let neighbors = core.topology.neighbors(self.node).to_vec();
                for to in neighbors {
                    core.push(at, Event::Deliver { to, from: self.node, packet: packet.clone() });
                }
            }
            Dest::Unicast(to) if core.topology.is_adjacent(self.node, to) => {
                core.push(at, Event::Deliver { to, from: self.node, packet });
            }
            Dest::Unicast(next_hop) => {
                core.push(at, Event::LinkFailure { node: self.node, next_hop, packet });
            }
        }
    }

    pub fn set_timer(&mut self, delay: f64, timer: Timer) {
        let at = self.now + delay.max(0.0);
        self.core.push(at, Event::Timer { node: self.node, timer });
    }

    /// Whether a first-time receiver of a flood forwards it.
    pub fn forward_coin(&mut self) -> bool {
        let p = self.core.p_broadcast;
        p >= 1.0 || (p > 0.0 && self.core.fwd_rng.gen::<f64>() < p)
    }

    pub fn ledger(&mut self) -> &mut Ledger {
        &mut self.core.ledger
    }

    pub fn deliver_data(&mut self, data: &Data) {
        let ledger = &mut self.core.ledger;
        ledger.data_delivered += 1;
        ledger.e2ed_sum += self.now - data.created;
        ledger.delivered_hops += data.hops as u64;
    }

    pub fn drop_data(&mut self, count: usize) {
        self.core.ledger.data_dropped += count as u64;
    }
}

impl Core {
    fn push(&mut self, at: f64, event: Event) {
        // Only ever scheduled at or after the current clock.
        self.queue.schedule(at, event).expect("event scheduled in the past");
    }
}

/// One seeded run of a protocol over a topology.
pub struct Simulation {
    config: SimConfig,
    core: Core,
    routers: Vec<Router>,
    mobility: Option<RandomWaypoint>,
    flows: Vec<CbrFlow>,
    last_time: f64,
    finished: bool,
}

impl Simulation {
    pub fn new(config: SimConfig, topology: Topology, flows: Vec<CbrFlow>) -> Result<Self, SimError> {
        config.constants.validate()?;
        if !(config.duration > 0.0) {
            return Err(SimError::Config(format!("duration must be positive, got {}", config.duration)));
        }
        for f in &flows {
            f.validate().map_err(SimError::Config)?;
            if f.source >= topology.len() || f.destination >= topology.len() {
                return Err(SimError::UnknownNode(f.source.max(f.destination)));
            }
        }
        let schedule = build_schedule(&config.constants)?;
        let routers = (0..topology.len())
            .map(|n| Router::new(n, &config.constants, &schedule, &config.router))
            .collect();
        let mobility = (!config.mobility.is_static())
            .then(|| RandomWaypoint::new(config.mobility, &topology, config.seed));
        let mut core = Core {
            queue: EventQueue::new(),
            topology,
            radio: config.radio,
            ledger: Ledger::default(),
            fwd_rng: stream(config.seed, Stream::Forwarding),
            p_broadcast: config.router.p_broadcast,
            next_uid: 0,
            next_data: 0,
            trace: config.trace.then(Vec::new),
        };
        if mobility.is_some() {
            core.push(0.0, Event::Mobility);
        }
        for (i, f) in flows.iter().enumerate() {
            if f.start < f.stop {
                core.push(f.start, Event::Emit { flow: i });
            }
        }
        Ok(Self { config, core, routers, mobility, flows, last_time: 0.0, finished: false })
    }

    /// Sends one data packet from `source` at time `at`.
    pub fn inject_data(&mut self, at: f64, source: NodeId, destination: NodeId, size: usize) -> Result<(), SimError> {
        self.check_node(source)?;
        self.check_node(destination)?;
        self.core.queue.schedule(at, Event::Inject { source, destination, size })?;
        Ok(())
    }

    /// Teleports a node at time `at`; adjacency follows immediately.
    pub fn schedule_move(&mut self, at: f64, node: NodeId, to: Point) -> Result<(), SimError> {
        self.check_node(node)?;
        self.core.queue.schedule(at, Event::Move { node, to })?;
        Ok(())
    }

    fn check_node(&self, node: NodeId) -> Result<(), SimError> {
        if node < self.routers.len() {
            Ok(())
        } else {
            Err(SimError::UnknownNode(node))
        }
    }

    /// Starts or stops recording the event trace.
    pub fn set_trace(&mut self, on: bool) {
        self.config.trace = on;
        if !on {
            self.core.trace = None;
        } else if self.core.trace.is_none() {
            self.core.trace = Some(Vec::new());
        }
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn topology(&self) -> &Topology {
        &self.core.topology
    }

    pub fn ledger(&self) -> &Ledger {
        &self.core.ledger
    }

    pub fn now(&self) -> f64 {
        self.core.queue.now()
    }

    /// Event trace lines: time, kind, nodes, packet id.
    pub fn trace(&self) -> &[String] {
        self.core.trace.as_deref().unwrap_or(&[])
    }

    pub fn router(&self, node: NodeId) -> &Router {
        &self.routers[node]
    }

    /// Processes every event up to and including time `until`.
    pub fn run_until(&mut self, until: f64) {
        while let Some(t) = self.core.queue.peek_time() {
            if t > until || t > self.config.duration {
                break;
            }
            let ev = self.core.queue.advance().expect("peeked event");
            self.step(ev.time, ev.payload);
        }
    }

    /// Runs to the configured duration and closes open bookkeeping.
    pub fn run(&mut self) -> &Ledger {
        self.run_until(self.config.duration);
        self.finish();
        &self.core.ledger
    }

    pub fn finish(&mut self) {
        if self.finished {
            return;
        }
        self.finished = true;
        let now = self.config.duration.max(self.core.queue.now());
        for n in 0..self.routers.len() {
            let mut ctx = Ctx { core: &mut self.core, node: n, now };
            self.routers[n].finish(&mut ctx);
        }
    }

    pub fn into_ledger(mut self) -> Ledger {
        self.finish();
        self.core.ledger
    }

    fn step(&mut self, now: f64, event: Event) {
        if now < self.last_time {
            self.core.ledger.violation(format!("clock went back from {} to {}", self.last_time, now));
        }
        self.last_time = now;
        self.core.ledger.events += 1;
        if let Some(trace) = self.core.trace.as_mut() {
            trace.push(trace_line(now, &event));
        }
        let node = match event {
            Event::Deliver { to, from, packet } => {
                self.core.ledger.deliveries += 1;
                let mut ctx = Ctx { core: &mut self.core, node: to, now };
                self.routers[to].on_packet(&mut ctx, from, packet.payload);
                Some(to)
            }
            Event::LinkFailure { node, next_hop, packet } => {
                self.core.ledger.link_failures += 1;
                let mut ctx = Ctx { core: &mut self.core, node, now };
                self.routers[node].on_link_failure(&mut ctx, next_hop, packet.payload);
                Some(node)
            }
            Event::Timer { node, timer } => {
                let mut ctx = Ctx { core: &mut self.core, node, now };
                self.routers[node].on_timer(&mut ctx, timer);
                Some(node)
            }
            Event::Mobility => {
                let dt = self.config.mobility.dt;
                if let Some(m) = self.mobility.as_mut() {
                    m.step(&mut self.core.topology, now, dt);
                }
                self.core.push(now + dt, Event::Mobility);
                None
            }
            Event::Emit { flow } => {
                let f = self.flows[flow];
                self.originate(now, f.source, f.destination, f.packet_size);
                if now + f.interval < f.stop {
                    self.core.push(now + f.interval, Event::Emit { flow });
                }
                Some(f.source)
            }
            Event::Inject { source, destination, size } => {
                self.originate(now, source, destination, size);
                Some(source)
            }
            Event::Move { node, to } => {
                self.core.topology.set_position(node, to);
                None
            }
        };
        if let Some(n) = node {
            self.check_loops(n, now);
        }
    }

    fn originate(&mut self, now: f64, source: NodeId, destination: NodeId, size: usize) {
        let id = self.core.next_data;
        self.core.next_data += 1;
        self.core.ledger.data_sent += 1;
        let data = Data {
            id,
            source,
            destination,
            created: now,
            size,
            route: Vec::new(),
            hop_index: 0,
            salvaged: 0,
            hops: 0,
        };
        let mut ctx = Ctx { core: &mut self.core, node: source, now };
        if source == destination {
            ctx.deliver_data(&data);
            return;
        }
        self.routers[source].send_data(&mut ctx, data);
    }

    /// Follows next hops toward every destination whose entry changed at
    /// `node`; revisiting a node is a routing loop.
    fn check_loops(&mut self, node: NodeId, now: f64) {
        let changed = self.routers[node].take_changed();
        for dest in changed {
            let mut seen = BTreeSet::from([node]);
            let mut cur = node;
            while cur != dest {
                let Some(next) = self.routers[cur].next_hop(dest, now) else { break };
                if !seen.insert(next) {
                    self.core
                        .ledger
                        .violation(format!("routing loop toward {dest} through {next} at t={now:.6}"));
                    break;
                }
                cur = next;
            }
        }
    }
}

fn trace_line(now: f64, event: &Event) -> String {
    match event {
        Event::Deliver { to, from, packet } => {
            format!("{now:.6}\t{}\t{from}>{to}\t{}", packet.payload.kind(), packet.uid)
        }
        Event::LinkFailure { node, next_hop, packet } => {
            format!("{now:.6}\tLINK_FAIL\t{node}>{next_hop}\t{}", packet.uid)
        }
        Event::Timer { node, timer } => format!("{now:.6}\tTIMER:{}\t{node}\t-", timer.tag()),
        Event::Mobility => format!("{now:.6}\tMOBILITY\t-\t-"),
        Event::Emit { flow } => format!("{now:.6}\tEMIT\tflow{flow}\t-"),
        Event::Inject { source, destination, .. } => format!("{now:.6}\tEMIT\t{source}>{destination}\t-"),
        Event::Move { node, .. } => format!("{now:.6}\tMOVE\t{node}\t-"),
    }
}
