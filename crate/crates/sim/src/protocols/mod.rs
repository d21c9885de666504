//! Control planes for AODV, DYMO and DSR.
//!
//! AODV and DYMO share one hop-by-hop distance-vector engine ([`dv`]) and
//! differ in gratuitous replies, local repair and ring schedule. DSR
//! ([`dsr`]) routes by source route out of a path cache.

pub mod dsr;
pub mod dv;

use overhead_core::{Protocol, ProtocolConstants, RingSchedule};
use serde::{Deserialize, Serialize};

use crate::packet::{Data, Payload};
use crate::sim::Ctx;
use crate::NodeId;

pub use dsr::DsrRouter;
pub use dv::DvRouter;

/// Behaviour knobs the protocol constants leave open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RouterConfig {
    /// Probability a first-time receiver forwards a flooded request.
    pub p_broadcast: f64,
    /// Seconds a route stays usable after its last refresh.
    pub route_lifetime: f64,
    /// Seconds after its last data packet during which a route counts as in use.
    pub active_route_timeout: f64,
    /// Beacon intervals a neighbour may stay silent before its link is broken.
    pub allowed_hello_loss: u32,
    /// Whether hop-by-hop protocols treat a failed unicast as a link break.
    pub link_layer_feedback: bool,
    /// Packets buffered per destination while a route is sought.
    pub queue_cap: usize,
    /// Farthest destination, in hops, a local repair is attempted for.
    pub max_repair_ttl: u32,
    pub cache_capacity: usize,
    pub cache_lifetime: f64,
    pub max_salvage: u32,
    /// Replies a target sends to distinct copies of one request.
    pub target_replies: u32,
    /// Whether intermediate nodes answer from their own routes.
    pub cached_replies: bool,
    /// Ceiling on DSR's back-off between failed discoveries for one target.
    pub max_request_period: f64,
}

impl Default for RouterConfig {
    fn default() -> Self {
        Self {
            p_broadcast: 1.0,
            route_lifetime: 10.0,
            active_route_timeout: 3.0,
            allowed_hello_loss: 2,
            link_layer_feedback: false,
            queue_cap: 64,
            max_repair_ttl: 10,
            cache_capacity: 64,
            cache_lifetime: 300.0,
            max_salvage: 15,
            target_replies: 3,
            cached_replies: true,
            max_request_period: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Timer {
    /// Reply wait for ring `id` of the session toward `target`.
    Ring { target: NodeId, id: u32 },
    Hello,
    /// A salvaged packet leaves once the alternate route check completes.
    Salvage(Data),
    /// End of the hold-off after a failed discovery toward `target`.
    Backoff { target: NodeId },
}

impl Timer {
    pub fn tag(&self) -> &'static str {
        match self {
            Timer::Ring { .. } => "RING",
            Timer::Hello => "HELLO",
            Timer::Salvage(_) => "SALVAGE",
            Timer::Backoff { .. } => "BACKOFF",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Router {
    Dv(Box<DvRouter>),
    Dsr(Box<DsrRouter>),
}

impl Router {
    pub fn new(node: NodeId, constants: &ProtocolConstants, schedule: &RingSchedule, config: &RouterConfig) -> Self {
        match constants.protocol {
            Protocol::Aodv | Protocol::Dymo => {
                Router::Dv(Box::new(DvRouter::new(node, constants.clone(), schedule.clone(), *config)))
            }
            Protocol::Dsr => Router::Dsr(Box::new(DsrRouter::new(node, constants.clone(), schedule.clone(), *config))),
        }
    }

    pub fn on_packet(&mut self, ctx: &mut Ctx<'_>, from: NodeId, payload: Payload) {
        match self {
            Router::Dv(r) => r.on_packet(ctx, from, payload),
            Router::Dsr(r) => r.on_packet(ctx, from, payload),
        }
    }

    pub fn on_link_failure(&mut self, ctx: &mut Ctx<'_>, next_hop: NodeId, payload: Payload) {
        match self {
            Router::Dv(r) => r.on_link_failure(ctx, next_hop, payload),
            Router::Dsr(r) => r.on_link_failure(ctx, next_hop, payload),
        }
    }

    pub fn on_timer(&mut self, ctx: &mut Ctx<'_>, timer: Timer) {
        match self {
            Router::Dv(r) => r.on_timer(ctx, timer),
            Router::Dsr(r) => r.on_timer(ctx, timer),
        }
    }

    pub fn send_data(&mut self, ctx: &mut Ctx<'_>, data: Data) {
        match self {
            Router::Dv(r) => r.send_data(ctx, data),
            Router::Dsr(r) => r.send_data(ctx, data),
        }
    }

    /// Next hop of a usable hop-by-hop route; source routing has none.
    pub fn next_hop(&self, dest: NodeId, now: f64) -> Option<NodeId> {
        match self {
            Router::Dv(r) => r.next_hop(dest, now),
            Router::Dsr(_) => None,
        }
    }

    /// Destinations whose table entry changed since the last call.
    pub fn take_changed(&mut self) -> Vec<NodeId> {
        match self {
            Router::Dv(r) => r.take_changed(),
            Router::Dsr(_) => Vec::new(),
        }
    }

    pub fn finish(&mut self, ctx: &mut Ctx<'_>) {
        if let Router::Dv(r) = self {
            r.finish(ctx);
        }
    }

    pub fn as_dv(&self) -> Option<&DvRouter> {
        match self {
            Router::Dv(r) => Some(r),
            Router::Dsr(_) => None,
        }
    }

    pub fn as_dsr(&self) -> Option<&DsrRouter> {
        match self {
            Router::Dsr(r) => Some(r),
            Router::Dv(_) => None,
        }
    }
}

/// Appends `data` to a destination queue, evicting the oldest on overflow.
/// Returns the number of packets evicted.
pub(crate) fn enqueue(queue: &mut std::collections::VecDeque<Data>, data: Data, cap: usize) -> usize {
    let mut dropped = 0;
    while cap > 0 && queue.len() >= cap {
        queue.pop_front();
        dropped += 1;
    }
    if cap == 0 {
        return dropped + 1;
    }
    queue.push_back(data);
    dropped
}
