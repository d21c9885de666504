use std::fmt;

use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Rreq,
    Rrep,
    Rerr,
    Hello,
    Data,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Rreq => "RREQ",
            Kind::Rrep => "RREP",
            Kind::Rerr => "RERR",
            Kind::Hello => "HELLO",
            Kind::Data => "DATA",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dest {
    Broadcast,
    Unicast(NodeId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rreq {
    pub id: u32,
    pub originator: NodeId,
    pub origin_seq: u32,
    pub target: NodeId,
    pub target_seq: Option<u32>,
    /// Remaining hops this copy may still be forwarded.
    pub ttl: u32,
    pub hop_count: u32,
    /// 1-based ring index within the originator's session.
    pub ring: usize,
    pub local_repair: bool,
    /// Source-routing protocols: nodes traversed so far, originator first.
    pub route: Vec<NodeId>,
    /// Links the originator learned are broken, carried as metadata.
    pub piggyback: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rrep {
    /// Node that asked for the route.
    pub originator: NodeId,
    pub target: NodeId,
    pub target_seq: u32,
    /// Hops from the current holder to `target`.
    pub hop_count: u32,
    pub responder: NodeId,
    pub gratuitous: bool,
    /// Transmissions this reply has taken so far.
    pub travelled: u32,
    pub rreq_id: u32,
    /// Full source route, originator first and target last.
    pub route: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rerr {
    /// Destinations no longer reachable, with the sequence number to adopt.
    pub unreachable: Vec<(NodeId, u32)>,
    pub broken_link: Option<(NodeId, NodeId)>,
    /// Unicast return path toward the origin, current holder first.
    pub return_route: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Data {
    pub id: u64,
    pub source: NodeId,
    pub destination: NodeId,
    pub created: f64,
    pub size: usize,
    /// Source route in use, current position at `hop_index`.
    pub route: Vec<NodeId>,
    pub hop_index: usize,
    pub salvaged: u32,
    pub hops: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Rreq(Rreq),
    Rrep(Rrep),
    Rerr(Rerr),
    Hello,
    Data(Data),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    pub uid: u64,
    pub payload: Payload,
}

const IP_HEADER: usize = 20;

impl Payload {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::Rreq(_) => Kind::Rreq,
            Payload::Rrep(_) => Kind::Rrep,
            Payload::Rerr(_) => Kind::Rerr,
            Payload::Hello => Kind::Hello,
            Payload::Data(_) => Kind::Data,
        }
    }

    /// On-air size in bytes. Data packets carry their configured size plus
    /// any source route; control packets add an IP header.
    pub fn size(&self) -> usize {
        if let Payload::Data(d) = self {
            return d.size + 4 * d.route.len();
        }
        IP_HEADER
            + match self {
                Payload::Rreq(r) => 24 + 4 * r.route.len() + 8 * r.piggyback.len(),
                Payload::Rrep(r) => 20 + 4 * r.route.len(),
                Payload::Rerr(r) => 12 + 8 * r.unreachable.len() + 4 * r.return_route.len(),
                Payload::Hello => 20,
                Payload::Data(_) => 0,
            }
    }
}
