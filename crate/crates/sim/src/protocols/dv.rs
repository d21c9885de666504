//! Hop-by-hop on-demand routing shared by AODV and DYMO.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use overhead_core::{llr_time_cost, llr_ttl, DiscoveryResult, Protocol, ProtocolConstants, RingSchedule};

use super::{enqueue, RouterConfig, Timer};
use crate::ledger::{DiscoveryRecord, HelloPeriod};
use crate::packet::{Data, Dest, Payload, Rerr, Rrep, Rreq};
use crate::sim::Ctx;
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteState {
    Valid,
    Invalid,
    Repairing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteEntry {
    pub next_hop: NodeId,
    pub hops: u32,
    pub seq: Option<u32>,
    pub expiry: f64,
    pub state: RouteState,
    /// Upstream neighbours that forward through this entry.
    pub precursors: BTreeSet<NodeId>,
    pub last_used: f64,
    /// Hop distance from the source of the last data packet forwarded.
    pub upstream_hops: u32,
}

impl RouteEntry {
    pub fn usable(&self, now: f64) -> bool {
        self.state == RouteState::Valid && self.expiry > now
    }
}

#[derive(Debug, Clone)]
struct Session {
    ring: usize,
    id: u32,
    started: f64,
    /// Set for a local repair, holding its single ring TTL.
    repair_ttl: Option<u32>,
}

#[derive(Debug, Clone, Copy)]
struct Beacon {
    start: f64,
    hellos: u64,
}

#[derive(Debug, Clone)]
pub struct DvRouter {
    me: NodeId,
    protocol: Protocol,
    constants: ProtocolConstants,
    schedule: RingSchedule,
    cfg: RouterConfig,
    seq: u32,
    rreq_id: u32,
    routes: BTreeMap<NodeId, RouteEntry>,
    seen: BTreeSet<(NodeId, u32)>,
    sessions: BTreeMap<NodeId, Session>,
    queues: BTreeMap<NodeId, VecDeque<Data>>,
    last_heard: BTreeMap<NodeId, f64>,
    active_until: f64,
    beacon: Option<Beacon>,
    changed: BTreeSet<NodeId>,
}

impl DvRouter {
    pub fn new(me: NodeId, constants: ProtocolConstants, schedule: RingSchedule, cfg: RouterConfig) -> Self {
        Self {
            me,
            protocol: constants.protocol,
            constants,
            schedule,
            cfg,
            seq: 0,
            rreq_id: 0,
            routes: BTreeMap::new(),
            seen: BTreeSet::new(),
            sessions: BTreeMap::new(),
            queues: BTreeMap::new(),
            last_heard: BTreeMap::new(),
            active_until: f64::NEG_INFINITY,
            beacon: None,
            changed: BTreeSet::new(),
        }
    }

    pub fn route(&self, dest: NodeId) -> Option<&RouteEntry> {
        self.routes.get(&dest)
    }

    pub fn own_seq(&self) -> u32 {
        self.seq
    }

    pub fn next_hop(&self, dest: NodeId, now: f64) -> Option<NodeId> {
        self.routes.get(&dest).filter(|r| r.usable(now)).map(|r| r.next_hop)
    }

    pub fn take_changed(&mut self) -> Vec<NodeId> {
        std::mem::take(&mut self.changed).into_iter().collect()
    }

    pub fn finish(&mut self, ctx: &mut Ctx<'_>) {
        if let Some(b) = self.beacon.take() {
            let period = HelloPeriod { node: self.me, start: b.start, end: ctx.now, hellos: b.hellos };
            ctx.ledger().hello_periods.push(period);
        }
    }

    // ---- data plane ----

    pub fn send_data(&mut self, ctx: &mut Ctx<'_>, data: Data) {
        self.mark_active(ctx);
        let dest = data.destination;
        if self.next_hop(dest, ctx.now).is_some() {
            self.forward(ctx, data, None);
            return;
        }
        self.buffer(ctx, data);
        if !self.sessions.contains_key(&dest) {
            self.start_discovery(ctx, dest);
        }
    }

    fn buffer(&mut self, ctx: &mut Ctx<'_>, data: Data) {
        let dest = data.destination;
        let dropped = enqueue(self.queues.entry(dest).or_default(), data, self.cfg.queue_cap);
        ctx.drop_data(dropped);
    }

    fn forward(&mut self, ctx: &mut Ctx<'_>, mut data: Data, from: Option<NodeId>) {
        let now = ctx.now;
        let lifetime = self.cfg.route_lifetime;
        let Some(route) = self.routes.get_mut(&data.destination) else { return };
        route.last_used = now;
        route.expiry = route.expiry.max(now + lifetime);
        route.upstream_hops = data.hops;
        if let Some(f) = from {
            route.precursors.insert(f);
        }
        let next = route.next_hop;
        data.hops += 1;
        ctx.send(Dest::Unicast(next), Payload::Data(data));
    }

    fn handle_data(&mut self, ctx: &mut Ctx<'_>, from: NodeId, data: Data) {
        self.mark_active(ctx);
        let now = ctx.now;
        let lifetime = self.cfg.route_lifetime;
        if let Some(r) = self.routes.get_mut(&data.source).filter(|r| r.usable(now)) {
            r.expiry = r.expiry.max(now + lifetime);
        }
        if data.destination == self.me {
            ctx.deliver_data(&data);
            return;
        }
        let dest = data.destination;
        if self.next_hop(dest, now).is_some() {
            self.forward(ctx, data, Some(from));
        } else if self.sessions.contains_key(&dest) {
            self.buffer(ctx, data);
        } else {
            ctx.drop_data(1);
            let seq = self.routes.get(&dest).and_then(|r| r.seq).unwrap_or(0);
            ctx.send(
                Dest::Broadcast,
                Payload::Rerr(Rerr { unreachable: vec![(dest, seq)], broken_link: None, return_route: Vec::new() }),
            );
        }
    }

    fn flush(&mut self, ctx: &mut Ctx<'_>, dest: NodeId) {
        let Some(queue) = self.queues.remove(&dest) else { return };
        for data in queue {
            if self.next_hop(dest, ctx.now).is_some() {
                self.forward(ctx, data, None);
            } else {
                ctx.drop_data(1);
            }
        }
    }

    // ---- discovery ----

    fn start_discovery(&mut self, ctx: &mut Ctx<'_>, target: NodeId) {
        self.seq += 1;
        self.sessions.insert(target, Session { ring: 1, id: 0, started: ctx.now, repair_ttl: None });
        self.send_ring(ctx, target);
    }

    fn send_ring(&mut self, ctx: &mut Ctx<'_>, target: NodeId) {
        let Some(session) = self.sessions.get_mut(&target) else { return };
        let (ttl, timeout) = match session.repair_ttl {
            Some(ttl) => (ttl, llr_time_cost(ttl, &self.constants)),
            None => (
                self.schedule.ttl(session.ring).expect("ring within schedule"),
                self.schedule.timeout(session.ring).expect("ring within schedule"),
            ),
        };
        self.rreq_id += 1;
        let id = self.rreq_id;
        session.id = id;
        let ring = session.ring;
        let local_repair = session.repair_ttl.is_some();
        self.seen.insert((self.me, id));
        let rreq = Rreq {
            id,
            originator: self.me,
            origin_seq: self.seq,
            target,
            target_seq: self.routes.get(&target).and_then(|r| r.seq),
            ttl: ttl.saturating_sub(1),
            hop_count: 0,
            ring,
            local_repair,
            route: Vec::new(),
            piggyback: Vec::new(),
        };
        ctx.send(Dest::Broadcast, Payload::Rreq(rreq));
        ctx.set_timer(timeout, Timer::Ring { target, id });
    }

    fn on_ring_timeout(&mut self, ctx: &mut Ctx<'_>, target: NodeId, id: u32) {
        match self.sessions.get(&target) {
            Some(s) if s.id == id => {}
            _ => return,
        }
        if self.next_hop(target, ctx.now).is_some() {
            self.complete(ctx, target, None);
            return;
        }
        let session = self.sessions.get_mut(&target).expect("session checked above");
        if session.repair_ttl.is_some() {
            self.repair_failed(ctx, target);
            return;
        }
        session.ring += 1;
        if session.ring > self.schedule.len() {
            let s = self.sessions.remove(&target).expect("session checked above");
            let record = DiscoveryRecord {
                node: self.me,
                target,
                started: s.started,
                finished: ctx.now,
                result: DiscoveryResult::NoReply,
                local_repair: false,
                reply_hops: None,
            };
            ctx.ledger().discoveries.push(record);
            let dropped = self.queues.remove(&target).map_or(0, |q| q.len());
            ctx.drop_data(dropped);
            return;
        }
        self.send_ring(ctx, target);
    }

    fn complete(&mut self, ctx: &mut Ctx<'_>, target: NodeId, reply_hops: Option<u32>) {
        let Some(s) = self.sessions.remove(&target) else { return };
        if s.repair_ttl.is_some() {
            ctx.ledger().llr_successes += 1;
        }
        let record = DiscoveryRecord {
            node: self.me,
            target,
            started: s.started,
            finished: ctx.now,
            result: DiscoveryResult::ReplyAtRing(s.ring),
            local_repair: s.repair_ttl.is_some(),
            reply_hops,
        };
        ctx.ledger().discoveries.push(record);
        self.flush(ctx, target);
    }

    /// Applies the sequence-number update rule; returns whether the entry
    /// now holds the offered route, either newly or as a refresh.
    fn offer(&mut self, dest: NodeId, next_hop: NodeId, hops: u32, seq: u32, now: f64) -> bool {
        let expiry = now + self.cfg.route_lifetime;
        match self.routes.get_mut(&dest) {
            None => {
                self.routes.insert(
                    dest,
                    RouteEntry {
                        next_hop,
                        hops,
                        seq: Some(seq),
                        expiry,
                        state: RouteState::Valid,
                        precursors: BTreeSet::new(),
                        last_used: f64::NEG_INFINITY,
                        upstream_hops: 0,
                    },
                );
            }
            Some(r) => {
                let better = match r.seq {
                    None => true,
                    Some(old) => seq > old || (seq == old && (!r.usable(now) || hops < r.hops)),
                };
                if !better {
                    let same = r.usable(now) && r.next_hop == next_hop && r.seq == Some(seq) && r.hops == hops;
                    if same {
                        r.expiry = r.expiry.max(expiry);
                    }
                    return same;
                }
                if r.next_hop != next_hop {
                    r.precursors.clear();
                }
                r.next_hop = next_hop;
                r.hops = hops;
                r.seq = Some(seq);
                r.state = RouteState::Valid;
                r.expiry = r.expiry.max(expiry);
            }
        }
        self.changed.insert(dest);
        true
    }

    /// A neighbour was heard: keep a one-hop route to it.
    fn touch(&mut self, now: f64, from: NodeId) {
        self.last_heard.insert(from, now);
        let expiry = now + self.cfg.route_lifetime;
        let r = self.routes.entry(from).or_insert(RouteEntry {
            next_hop: from,
            hops: 1,
            seq: None,
            expiry,
            state: RouteState::Valid,
            precursors: BTreeSet::new(),
            last_used: f64::NEG_INFINITY,
            upstream_hops: 0,
        });
        if r.usable(now) && r.next_hop == from {
            r.expiry = r.expiry.max(expiry);
            return;
        }
        if r.state == RouteState::Repairing {
            return;
        }
        r.next_hop = from;
        r.hops = 1;
        r.state = RouteState::Valid;
        r.expiry = r.expiry.max(expiry);
        self.changed.insert(from);
    }

    fn handle_rreq(&mut self, ctx: &mut Ctx<'_>, from: NodeId, r: Rreq) {
        let now = ctx.now;
        self.touch(now, from);
        if r.originator == self.me || !self.seen.insert((r.originator, r.id)) {
            return;
        }
        self.offer(r.originator, from, r.hop_count + 1, r.origin_seq, now);
        let back = self.next_hop(r.originator, now).unwrap_or(from);
        if r.target == self.me {
            if let Some(ts) = r.target_seq {
                self.seq = self.seq.max(ts);
            }
            let rrep = Rrep {
                originator: r.originator,
                target: self.me,
                target_seq: self.seq,
                hop_count: 0,
                responder: self.me,
                gratuitous: false,
                travelled: 1,
                rreq_id: r.id,
                route: Vec::new(),
            };
            ctx.send(Dest::Unicast(back), Payload::Rrep(rrep));
            return;
        }
        if self.protocol.gratuitous_replies() && self.cfg.cached_replies {
            if let Some(entry) = self.routes.get_mut(&r.target).filter(|e| e.usable(now)) {
                let fresh = match (entry.seq, r.target_seq) {
                    (Some(have), Some(want)) => have >= want,
                    (Some(_), None) => true,
                    (None, _) => false,
                };
                if fresh && entry.next_hop != back {
                    entry.precursors.insert(back);
                    let (hops, seq, fwd) = (entry.hops, entry.seq.unwrap_or(0), entry.next_hop);
                    if let Some(rev) = self.routes.get_mut(&r.originator) {
                        rev.precursors.insert(fwd);
                    }
                    let rrep = Rrep {
                        originator: r.originator,
                        target: r.target,
                        target_seq: seq,
                        hop_count: hops,
                        responder: self.me,
                        gratuitous: true,
                        travelled: 1,
                        rreq_id: r.id,
                        route: Vec::new(),
                    };
                    ctx.ledger().cached_replies += 1;
                    ctx.send(Dest::Unicast(back), Payload::Rrep(rrep));
                    return;
                }
            }
        }
        if r.ttl > 0 && ctx.forward_coin() {
            let fwd = Rreq { ttl: r.ttl - 1, hop_count: r.hop_count + 1, ..r };
            ctx.send(Dest::Broadcast, Payload::Rreq(fwd));
        }
    }

    fn handle_rrep(&mut self, ctx: &mut Ctx<'_>, from: NodeId, r: Rrep) {
        let now = ctx.now;
        self.touch(now, from);
        let updated = self.offer(r.target, from, r.hop_count + 1, r.target_seq, now);
        if r.originator == self.me {
            if self.sessions.contains_key(&r.target) && self.next_hop(r.target, now).is_some() {
                self.complete(ctx, r.target, Some(r.travelled));
            }
            return;
        }
        if !updated {
            return;
        }
        let Some(back) = self.next_hop(r.originator, now) else { return };
        if let Some(e) = self.routes.get_mut(&r.target) {
            e.precursors.insert(back);
        }
        if let Some(e) = self.routes.get_mut(&r.originator) {
            e.precursors.insert(from);
        }
        let fwd = Rrep { hop_count: r.hop_count + 1, travelled: r.travelled + 1, ..r };
        ctx.send(Dest::Unicast(back), Payload::Rrep(fwd));
    }

    fn handle_rerr(&mut self, ctx: &mut Ctx<'_>, from: NodeId, e: Rerr) {
        let now = ctx.now;
        self.last_heard.insert(from, now);
        let mut onward = Vec::new();
        for (dest, seq) in e.unreachable {
            let Some(r) = self.routes.get_mut(&dest) else { continue };
            if r.next_hop != from || r.state != RouteState::Valid {
                continue;
            }
            r.state = RouteState::Invalid;
            r.seq = Some(r.seq.map_or(seq, |s| s.max(seq)));
            self.changed.insert(dest);
            if !r.precursors.is_empty() {
                onward.push((dest, r.seq.unwrap_or(seq)));
                r.precursors.clear();
            }
        }
        if !onward.is_empty() {
            ctx.send(
                Dest::Broadcast,
                Payload::Rerr(Rerr { unreachable: onward, broken_link: None, return_route: Vec::new() }),
            );
        }
    }

    // ---- maintenance ----

    pub fn on_link_failure(&mut self, ctx: &mut Ctx<'_>, next_hop: NodeId, payload: Payload) {
        if !self.cfg.link_layer_feedback {
            if let Payload::Data(_) = payload {
                ctx.drop_data(1);
            }
            return;
        }
        let pending = match payload {
            Payload::Data(mut d) => {
                // The failed hop never happened.
                d.hops -= 1;
                Some(d)
            }
            _ => None,
        };
        self.link_break(ctx, next_hop, pending);
    }

    /// Every route through `neighbor` is lost. AODV repairs routes it carries
    /// for other sources; everything else is invalidated and reported
    /// upstream in one RERR.
    fn link_break(&mut self, ctx: &mut Ctx<'_>, neighbor: NodeId, pending: Option<Data>) {
        let now = ctx.now;
        self.last_heard.remove(&neighbor);
        let affected: Vec<NodeId> = self
            .routes
            .iter()
            .filter(|(_, r)| r.next_hop == neighbor && r.state == RouteState::Valid)
            .map(|(d, _)| *d)
            .collect();
        let mut unreachable = Vec::new();
        for dest in affected {
            let r = self.routes.get_mut(&dest).expect("affected route exists");
            r.seq = r.seq.map(|s| s + 1);
            self.changed.insert(dest);
            let carried = match &pending {
                Some(d) if d.destination == dest => Some(d.source != self.me).filter(|x| *x).map(|_| d.hops),
                _ => None,
            };
            let in_use = now - r.last_used <= self.cfg.active_route_timeout && !r.precursors.is_empty();
            let upstream = carried.or(in_use.then_some(r.upstream_hops));
            let repair = self.protocol == Protocol::Aodv
                && r.hops <= self.cfg.max_repair_ttl
                && upstream.is_some()
                && !self.sessions.contains_key(&dest);
            if repair {
                r.state = RouteState::Repairing;
                let ttl = llr_ttl(r.hops, upstream.unwrap_or(0), &self.constants);
                ctx.ledger().llr_attempts += 1;
                self.sessions.insert(dest, Session { ring: 1, id: 0, started: now, repair_ttl: Some(ttl) });
                self.send_ring(ctx, dest);
            } else {
                r.state = RouteState::Invalid;
                if !r.precursors.is_empty() {
                    unreachable.push((dest, r.seq.unwrap_or(0)));
                    r.precursors.clear();
                }
            }
        }
        if !unreachable.is_empty() {
            ctx.send(
                Dest::Broadcast,
                Payload::Rerr(Rerr { unreachable, broken_link: Some((self.me, neighbor)), return_route: Vec::new() }),
            );
        }
        if let Some(data) = pending {
            let dest = data.destination;
            if self.next_hop(dest, now).is_some() {
                self.forward(ctx, data, None);
            } else if self.sessions.contains_key(&dest) {
                self.buffer(ctx, data);
            } else if data.source == self.me {
                self.buffer(ctx, data);
                self.start_discovery(ctx, dest);
            } else {
                ctx.drop_data(1);
            }
        }
    }

    fn repair_failed(&mut self, ctx: &mut Ctx<'_>, target: NodeId) {
        let s = self.sessions.remove(&target).expect("repair session exists");
        let record = DiscoveryRecord {
            node: self.me,
            target,
            started: s.started,
            finished: ctx.now,
            result: DiscoveryResult::NoReply,
            local_repair: true,
            reply_hops: None,
        };
        ctx.ledger().discoveries.push(record);
        let dropped = self.queues.remove(&target).map_or(0, |q| q.len());
        ctx.drop_data(dropped);
        let Some(r) = self.routes.get_mut(&target) else { return };
        r.state = RouteState::Invalid;
        self.changed.insert(target);
        if !r.precursors.is_empty() {
            let seq = r.seq.unwrap_or(0);
            r.precursors.clear();
            ctx.send(
                Dest::Broadcast,
                Payload::Rerr(Rerr { unreachable: vec![(target, seq)], broken_link: None, return_route: Vec::new() }),
            );
        }
    }

    fn mark_active(&mut self, ctx: &mut Ctx<'_>) {
        self.active_until = ctx.now + self.cfg.active_route_timeout;
        if self.protocol.uses_hello() && self.beacon.is_none() {
            self.beacon = Some(Beacon { start: ctx.now, hellos: 0 });
            ctx.set_timer(self.constants.hello_interval, Timer::Hello);
        }
    }

    /// Beacons while the node takes part in an active route and declares
    /// silent next hops broken.
    fn on_hello_tick(&mut self, ctx: &mut Ctx<'_>) {
        let now = ctx.now;
        let Some(mut beacon) = self.beacon else { return };
        let limit = self.cfg.allowed_hello_loss as f64 * self.constants.hello_interval;
        let silent: BTreeSet<NodeId> = self
            .routes
            .values()
            .filter(|r| r.usable(now) && now - r.last_used <= self.cfg.active_route_timeout)
            .map(|r| r.next_hop)
            .filter(|nh| now - self.last_heard.get(nh).copied().unwrap_or(now) > limit + 1e-9)
            .collect();
        for nh in silent {
            self.link_break(ctx, nh, None);
        }
        if now < self.active_until {
            beacon.hellos += 1;
            self.beacon = Some(beacon);
            ctx.send(Dest::Broadcast, Payload::Hello);
            ctx.set_timer(self.constants.hello_interval, Timer::Hello);
        } else {
            self.beacon = None;
            let period = HelloPeriod { node: self.me, start: beacon.start, end: now, hellos: beacon.hellos };
            ctx.ledger().hello_periods.push(period);
        }
    }

    pub fn on_packet(&mut self, ctx: &mut Ctx<'_>, from: NodeId, payload: Payload) {
        match payload {
            Payload::Rreq(r) => self.handle_rreq(ctx, from, r),
            Payload::Rrep(r) => self.handle_rrep(ctx, from, r),
            Payload::Rerr(e) => self.handle_rerr(ctx, from, e),
            Payload::Hello => {
                self.last_heard.insert(from, ctx.now);
            }
            Payload::Data(d) => {
                self.last_heard.insert(from, ctx.now);
                self.handle_data(ctx, from, d);
            }
        }
    }

    pub fn on_timer(&mut self, ctx: &mut Ctx<'_>, timer: Timer) {
        match timer {
            Timer::Ring { target, id } => self.on_ring_timeout(ctx, target, id),
            Timer::Hello => self.on_hello_tick(ctx),
            Timer::Salvage(_) | Timer::Backoff { .. } => {}
        }
    }
}
