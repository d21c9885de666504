//! Source routing with a path cache, packet salvaging and route errors.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use overhead_core::{DiscoveryResult, ProtocolConstants, RingSchedule};

use super::{enqueue, RouterConfig, Timer};
use crate::ledger::DiscoveryRecord;
use crate::packet::{Data, Dest, Payload, Rerr, Rrep, Rreq};
use crate::sim::Ctx;
use crate::NodeId;

#[derive(Debug, Clone, PartialEq)]
pub struct CachedRoute {
    /// Starts at the owning node; never repeats a node.
    pub path: Vec<NodeId>,
    pub inserted: f64,
}

/// Bounded set of loop-free paths rooted at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteCache {
    routes: Vec<CachedRoute>,
    capacity: usize,
    lifetime: f64,
}

impl RouteCache {
    pub fn new(capacity: usize, lifetime: f64) -> Self {
        Self { routes: Vec::new(), capacity, lifetime }
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn routes(&self) -> &[CachedRoute] {
        &self.routes
    }

    /// Stores the longest loop-free prefix of `path`.
    pub fn insert(&mut self, path: &[NodeId], now: f64) {
        let mut seen = BTreeSet::new();
        let clean: Vec<NodeId> = path.iter().copied().take_while(|n| seen.insert(*n)).collect();
        if clean.len() < 2 || self.capacity == 0 {
            return;
        }
        self.expire(now);
        if let Some(r) = self.routes.iter_mut().find(|r| r.path.starts_with(&clean)) {
            r.inserted = now;
            return;
        }
        self.routes.retain(|r| !clean.starts_with(&r.path));
        if self.routes.len() >= self.capacity {
            let oldest = self
                .routes
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.inserted.total_cmp(&b.1.inserted))
                .map(|(i, _)| i)
                .expect("cache is full");
            self.routes.remove(oldest);
        }
        self.routes.push(CachedRoute { path: clean, inserted: now });
    }

    fn expire(&mut self, now: f64) {
        let lifetime = self.lifetime;
        self.routes.retain(|r| now - r.inserted <= lifetime);
    }

    /// Shortest cached path to `dest`, owner first and `dest` last.
    pub fn find(&self, dest: NodeId, now: f64) -> Option<Vec<NodeId>> {
        self.routes
            .iter()
            .filter(|r| now - r.inserted <= self.lifetime)
            .filter_map(|r| r.path.iter().position(|&n| n == dest).map(|i| &r.path[..=i]))
            .min_by_key(|p| p.len())
            .map(<[NodeId]>::to_vec)
    }

    /// Truncates every path at the link `a`–`b`, in either direction.
    pub fn remove_link(&mut self, a: NodeId, b: NodeId) {
        for r in &mut self.routes {
            if let Some(i) = r.path.windows(2).position(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a)) {
                r.path.truncate(i + 1);
            }
        }
        self.routes.retain(|r| r.path.len() >= 2);
    }
}

#[derive(Debug, Clone)]
struct Session {
    ring: usize,
    id: u32,
    started: f64,
}

#[derive(Debug, Clone)]
pub struct DsrRouter {
    me: NodeId,
    constants: ProtocolConstants,
    schedule: RingSchedule,
    cfg: RouterConfig,
    rreq_id: u32,
    cache: RouteCache,
    seen: BTreeSet<(NodeId, u32)>,
    replies: BTreeMap<(NodeId, u32), u32>,
    sessions: BTreeMap<NodeId, Session>,
    queues: BTreeMap<NodeId, VecDeque<Data>>,
    piggyback: Vec<(NodeId, NodeId)>,
    /// Consecutive failed discoveries per target and when the next may start.
    backoff: BTreeMap<NodeId, (u32, f64)>,
}

fn loop_free(path: &[NodeId]) -> bool {
    let mut seen = BTreeSet::new();
    path.iter().all(|n| seen.insert(*n))
}

impl DsrRouter {
    pub fn new(me: NodeId, constants: ProtocolConstants, schedule: RingSchedule, cfg: RouterConfig) -> Self {
        Self {
            me,
            constants,
            schedule,
            cfg,
            rreq_id: 0,
            cache: RouteCache::new(cfg.cache_capacity, cfg.cache_lifetime),
            seen: BTreeSet::new(),
            replies: BTreeMap::new(),
            sessions: BTreeMap::new(),
            queues: BTreeMap::new(),
            piggyback: Vec::new(),
            backoff: BTreeMap::new(),
        }
    }

    pub fn cache(&self) -> &RouteCache {
        &self.cache
    }

    pub fn pending_piggyback(&self) -> &[(NodeId, NodeId)] {
        &self.piggyback
    }

    /// Learns both directions of `path` around this node's position in it.
    fn learn(&mut self, path: &[NodeId], now: f64) {
        let Some(i) = path.iter().position(|&n| n == self.me) else { return };
        self.cache.insert(&path[i..], now);
        let back: Vec<NodeId> = path[..=i].iter().rev().copied().collect();
        self.cache.insert(&back, now);
    }

    // ---- data plane ----

    pub fn send_data(&mut self, ctx: &mut Ctx<'_>, mut data: Data) {
        let dest = data.destination;
        if let Some(route) = self.cache.find(dest, ctx.now) {
            data.route = route;
            data.hop_index = 0;
            self.forward(ctx, data);
            return;
        }
        let dropped = enqueue(self.queues.entry(dest).or_default(), data, self.cfg.queue_cap);
        ctx.drop_data(dropped);
        let held = self.backoff.get(&dest).is_some_and(|&(_, until)| ctx.now < until);
        if !held {
            self.start_discovery(ctx, dest);
        }
    }

    fn start_discovery(&mut self, ctx: &mut Ctx<'_>, target: NodeId) {
        if let std::collections::btree_map::Entry::Vacant(e) = self.sessions.entry(target) {
            e.insert(Session { ring: 1, id: 0, started: ctx.now });
            self.send_ring(ctx, target);
        }
    }

    /// Packets that arrived while discoveries toward `target` were held off.
    fn on_backoff_end(&mut self, ctx: &mut Ctx<'_>, target: NodeId) {
        if self.queues.get(&target).is_none_or(VecDeque::is_empty) {
            return;
        }
        if self.cache.find(target, ctx.now).is_some() {
            self.flush(ctx, target);
        } else {
            self.start_discovery(ctx, target);
        }
    }

    fn forward(&mut self, ctx: &mut Ctx<'_>, mut data: Data) {
        if !loop_free(&data.route) {
            ctx.ledger().violation(format!("source route {:?} repeats a node", data.route));
        }
        let next = data.route[data.hop_index + 1];
        data.hop_index += 1;
        data.hops += 1;
        ctx.send(Dest::Unicast(next), Payload::Data(data));
    }

    fn handle_data(&mut self, ctx: &mut Ctx<'_>, data: Data) {
        if data.route.get(data.hop_index) != Some(&self.me) {
            return;
        }
        self.learn(&data.route.clone(), ctx.now);
        if data.destination == self.me {
            ctx.deliver_data(&data);
        } else {
            self.forward(ctx, data);
        }
    }

    fn flush(&mut self, ctx: &mut Ctx<'_>, dest: NodeId) {
        let Some(queue) = self.queues.remove(&dest) else { return };
        for mut data in queue {
            match self.cache.find(dest, ctx.now) {
                Some(route) => {
                    data.route = route;
                    data.hop_index = 0;
                    self.forward(ctx, data);
                }
                None => ctx.drop_data(1),
            }
        }
    }

    // ---- discovery ----

    fn send_ring(&mut self, ctx: &mut Ctx<'_>, target: NodeId) {
        let Some(session) = self.sessions.get_mut(&target) else { return };
        let ttl = self.schedule.ttl(session.ring).expect("ring within schedule");
        let timeout = self.schedule.timeout(session.ring).expect("ring within schedule");
        self.rreq_id += 1;
        session.id = self.rreq_id;
        let rreq = Rreq {
            id: self.rreq_id,
            originator: self.me,
            origin_seq: 0,
            target,
            target_seq: None,
            ttl: ttl.saturating_sub(1),
            hop_count: 0,
            ring: session.ring,
            local_repair: false,
            route: vec![self.me],
            piggyback: std::mem::take(&mut self.piggyback),
        };
        self.seen.insert((self.me, self.rreq_id));
        ctx.send(Dest::Broadcast, Payload::Rreq(rreq));
        ctx.set_timer(timeout, Timer::Ring { target, id: self.rreq_id });
    }

    fn on_ring_timeout(&mut self, ctx: &mut Ctx<'_>, target: NodeId, id: u32) {
        match self.sessions.get(&target) {
            Some(s) if s.id == id => {}
            _ => return,
        }
        if self.cache.find(target, ctx.now).is_some() {
            self.complete(ctx, target, None);
            return;
        }
        let session = self.sessions.get_mut(&target).expect("session checked above");
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
            // The doubling continues past the last ring, up to the ceiling.
            let last = self.schedule.timeout(self.schedule.len()).expect("schedule is non-empty");
            let entry = self.backoff.entry(target).or_insert((0, 0.0));
            entry.0 += 1;
            let hold = (last * 2f64.powi(entry.0 as i32)).min(self.cfg.max_request_period);
            entry.1 = ctx.now + hold;
            ctx.set_timer(hold, Timer::Backoff { target });
            return;
        }
        self.send_ring(ctx, target);
    }

    fn complete(&mut self, ctx: &mut Ctx<'_>, target: NodeId, reply_hops: Option<u32>) {
        let Some(s) = self.sessions.remove(&target) else { return };
        self.backoff.remove(&target);
        let record = DiscoveryRecord {
            node: self.me,
            target,
            started: s.started,
            finished: ctx.now,
            result: DiscoveryResult::ReplyAtRing(s.ring),
            local_repair: false,
            reply_hops,
        };
        ctx.ledger().discoveries.push(record);
        self.flush(ctx, target);
    }

    fn handle_rreq(&mut self, ctx: &mut Ctx<'_>, from: NodeId, r: Rreq) {
        let now = ctx.now;
        if r.originator == self.me || r.route.contains(&self.me) {
            return;
        }
        for &(a, b) in &r.piggyback {
            self.cache.remove_link(a, b);
        }
        let mut back = vec![self.me];
        back.extend(r.route.iter().rev());
        self.cache.insert(&back, now);
        if r.target == self.me {
            let n = self.replies.entry((r.originator, r.id)).or_insert(0);
            if *n >= self.cfg.target_replies {
                return;
            }
            *n += 1;
            self.seen.insert((r.originator, r.id));
            let mut route = r.route.clone();
            route.push(self.me);
            self.reply(ctx, from, r, route, false);
            return;
        }
        if !self.seen.insert((r.originator, r.id)) {
            return;
        }
        if self.cfg.cached_replies {
            if let Some(tail) = self.cache.find(r.target, now) {
                let mut route = r.route.clone();
                route.extend(tail);
                if loop_free(&route) {
                    ctx.ledger().cached_replies += 1;
                    self.reply(ctx, from, r, route, true);
                    return;
                }
            }
        }
        if r.ttl > 0 && ctx.forward_coin() {
            let mut route = r.route.clone();
            route.push(self.me);
            let fwd = Rreq { ttl: r.ttl - 1, hop_count: r.hop_count + 1, route, ..r };
            ctx.send(Dest::Broadcast, Payload::Rreq(fwd));
        }
    }

    fn reply(&mut self, ctx: &mut Ctx<'_>, from: NodeId, r: Rreq, route: Vec<NodeId>, gratuitous: bool) {
        let rrep = Rrep {
            originator: r.originator,
            target: r.target,
            target_seq: 0,
            hop_count: (route.len() - 1) as u32,
            responder: self.me,
            gratuitous,
            travelled: 1,
            rreq_id: r.id,
            route,
        };
        ctx.send(Dest::Unicast(from), Payload::Rrep(rrep));
    }

    fn handle_rrep(&mut self, ctx: &mut Ctx<'_>, r: Rrep) {
        let Some(i) = r.route.iter().position(|&n| n == self.me) else { return };
        if !loop_free(&r.route) {
            ctx.ledger().violation(format!("reply route {:?} repeats a node", r.route));
            return;
        }
        self.learn(&r.route, ctx.now);
        if i == 0 {
            let target = *r.route.last().expect("reply route is non-empty");
            if self.sessions.contains_key(&target) {
                self.complete(ctx, target, Some(r.travelled));
            }
            return;
        }
        let next = r.route[i - 1];
        let fwd = Rrep { travelled: r.travelled + 1, ..r };
        ctx.send(Dest::Unicast(next), Payload::Rrep(fwd));
    }

    fn handle_rerr(&mut self, ctx: &mut Ctx<'_>, e: Rerr) {
        if let Some((a, b)) = e.broken_link {
            self.cache.remove_link(a, b);
        }
        if e.return_route.first() != Some(&self.me) {
            return;
        }
        let rest = &e.return_route[1..];
        match rest.first() {
            Some(&next) => {
                let fwd = Rerr { return_route: rest.to_vec(), ..e };
                ctx.send(Dest::Unicast(next), Payload::Rerr(fwd));
            }
            None => {
                if let Some(link) = e.broken_link {
                    if !self.piggyback.contains(&link) {
                        self.piggyback.push(link);
                    }
                }
            }
        }
    }

    // ---- maintenance ----

    pub fn on_link_failure(&mut self, ctx: &mut Ctx<'_>, next_hop: NodeId, payload: Payload) {
        self.cache.remove_link(self.me, next_hop);
        if let Payload::Data(mut data) = payload {
            data.hops -= 1;
            self.salvage(ctx, next_hop, data);
        }
    }

    /// The detecting node checks its own cache for another way to the
    /// destination. Success re-sends the packet and tells the neighbours
    /// about the dead link; failure reports the link back to the source.
    fn salvage(&mut self, ctx: &mut Ctx<'_>, next_hop: NodeId, mut data: Data) {
        let link = (self.me, next_hop);
        if data.source == self.me && data.salvaged == 0 {
            if !self.piggyback.contains(&link) {
                self.piggyback.push(link);
            }
            self.send_data(ctx, data);
            return;
        }
        ctx.ledger().ps_probes += 1;
        let alternate = self.cache.find(data.destination, ctx.now);
        match alternate {
            Some(route) if data.salvaged < self.cfg.max_salvage => {
                data.route = route;
                data.hop_index = 0;
                data.salvaged += 1;
                ctx.ledger().salvaged += 1;
                ctx.set_timer(self.constants.ps_check_time_per_node, Timer::Salvage(data));
                ctx.send(
                    Dest::Broadcast,
                    Payload::Rerr(Rerr { unreachable: Vec::new(), broken_link: Some(link), return_route: Vec::new() }),
                );
            }
            _ => {
                let my_index = data.hop_index.saturating_sub(1);
                let back: Vec<NodeId> = data.route[..my_index].iter().rev().copied().collect();
                ctx.drop_data(1);
                if let Some(&next) = back.first() {
                    ctx.send(
                        Dest::Unicast(next),
                        Payload::Rerr(Rerr { unreachable: Vec::new(), broken_link: Some(link), return_route: back }),
                    );
                }
            }
        }
    }

    pub fn on_packet(&mut self, ctx: &mut Ctx<'_>, from: NodeId, payload: Payload) {
        match payload {
            Payload::Rreq(r) => self.handle_rreq(ctx, from, r),
            Payload::Rrep(r) => self.handle_rrep(ctx, r),
            Payload::Rerr(e) => self.handle_rerr(ctx, e),
            Payload::Hello => {}
            Payload::Data(d) => self.handle_data(ctx, d),
        }
    }

    pub fn on_timer(&mut self, ctx: &mut Ctx<'_>, timer: Timer) {
        match timer {
            Timer::Ring { target, id } => self.on_ring_timeout(ctx, target, id),
            Timer::Salvage(data) => self.forward(ctx, data),
            Timer::Backoff { target } => self.on_backoff_end(ctx, target),
            Timer::Hello => {}
        }
    }
}
