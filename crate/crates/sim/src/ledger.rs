use std::collections::BTreeMap;

use overhead_core::DiscoveryResult;
use serde::{Deserialize, Serialize};

use crate::packet::Kind;
use crate::NodeId;

/// One route-discovery session as seen by its originator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryRecord {
    pub node: NodeId,
    pub target: NodeId,
    pub started: f64,
    pub finished: f64,
    pub result: DiscoveryResult,
    pub local_repair: bool,
    /// Reply transmissions of the first reply to arrive.
    pub reply_hops: Option<u32>,
}

/// A continuous stretch during which a node was beaconing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelloPeriod {
    pub node: NodeId,
    pub start: f64,
    pub end: f64,
    pub hellos: u64,
}

/// Counters and invariant checks for one simulation run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub rreq: u64,
    pub rrep: u64,
    pub rerr: u64,
    pub hello: u64,
    /// Per-hop data transmissions.
    pub data_tx: u64,
    pub llr_rreq: u64,
    /// Alternate-route checks made while salvaging.
    pub ps_probes: u64,
    pub salvaged: u64,
    /// Replies originated by intermediates from their own tables or caches.
    pub cached_replies: u64,
    pub data_sent: u64,
    pub data_delivered: u64,
    pub data_dropped: u64,
    pub e2ed_sum: f64,
    pub delivered_hops: u64,
    pub transmissions: u64,
    pub deliveries: u64,
    pub link_failures: u64,
    pub llr_attempts: u64,
    pub llr_successes: u64,
    pub discoveries: Vec<DiscoveryRecord>,
    pub hello_periods: Vec<HelloPeriod>,
    pub violations: Vec<String>,
    pub events: u64,
    /// Times each node transmitted a given (originator, request id).
    #[serde(skip)]
    pub rreq_forwards: BTreeMap<(NodeId, NodeId, u32), u32>,
}

impl Ledger {
    pub fn count_tx(&mut self, kind: Kind) {
        self.transmissions += 1;
        match kind {
            Kind::Rreq => self.rreq += 1,
            Kind::Rrep => self.rrep += 1,
            Kind::Rerr => self.rerr += 1,
            Kind::Hello => self.hello += 1,
            Kind::Data => self.data_tx += 1,
        }
    }

    pub fn control_packets(&self) -> u64 {
        self.rreq + self.rrep + self.rerr + self.hello
    }

    /// Control packets per delivered data packet; `None` with no deliveries.
    pub fn nrl(&self) -> Option<f64> {
        (self.data_delivered > 0).then(|| self.control_packets() as f64 / self.data_delivered as f64)
    }

    pub fn e2ed_mean(&self) -> Option<f64> {
        (self.data_delivered > 0).then(|| self.e2ed_sum / self.data_delivered as f64)
    }

    pub fn mean_hops(&self) -> Option<f64> {
        (self.data_delivered > 0).then(|| self.delivered_hops as f64 / self.data_delivered as f64)
    }

    pub fn violation(&mut self, msg: String) {
        self.violations.push(msg);
    }

    /// Records a node transmitting a request; a second transmission of the
    /// same request by the same node is a duplicate-suppression violation.
    pub fn note_rreq_forward(&mut self, node: NodeId, originator: NodeId, id: u32) {
        let n = self.rreq_forwards.entry((node, originator, id)).or_insert(0);
        *n += 1;
        if *n == 2 {
            self.violations.push(format!("node {node} transmitted request ({originator}, {id}) twice"));
        }
    }

    /// Beacon periods whose count strays more than one from duration/interval.
    pub fn hello_mismatches(&self, interval: f64) -> Vec<HelloPeriod> {
        self.hello_periods
            .iter()
            .filter(|p| ((p.end - p.start) / interval - p.hellos as f64).abs() > 1.0 + 1e-9)
            .copied()
            .collect()
    }
}
