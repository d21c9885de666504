//! Energy and time cost of route discovery and route maintenance.
//!
//! Energy is counted in control-packet transmissions and time in seconds.
//! Flood costs charge the rebroadcasts a flood triggers: the nodes of ring
//! `j` each forward with probability `p_broadcast`, and each forwarding node
//! at hop `j` reaches `d_f[j]` new nodes on average.

use serde::{Deserialize, Serialize};

use crate::constants::ProtocolConstants;
use crate::error::ModelError;
use crate::profile::NetworkProfile;
use crate::protocol::Protocol;
use crate::schedule::RingSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscoveryResult {
    NoReply,
    /// 1-based index of the ring that produced the first reply.
    ReplyAtRing(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryOutcome {
    pub result: DiscoveryResult,
    /// Hop distance of every node that answered, destination included.
    pub replier_hop_counts: Vec<u32>,
}

impl DiscoveryOutcome {
    pub fn no_reply() -> Self {
        Self { result: DiscoveryResult::NoReply, replier_hop_counts: Vec::new() }
    }

    pub fn reply_at(ring: usize, replier_hop_counts: Vec<u32>) -> Self {
        Self { result: DiscoveryResult::ReplyAtRing(ring), replier_hop_counts }
    }

    /// Number of replying nodes (`n_rrep`).
    pub fn repliers(&self) -> usize {
        self.replier_hop_counts.len()
    }

    /// Number of rings the originator paid for under this outcome.
    pub fn rings_paid(&self, schedule: &RingSchedule) -> Result<usize, ModelError> {
        self.validate(schedule)?;
        Ok(match self.result {
            DiscoveryResult::NoReply => schedule.len(),
            DiscoveryResult::ReplyAtRing(k) => k,
        })
    }

    pub fn validate(&self, schedule: &RingSchedule) -> Result<(), ModelError> {
        match self.result {
            DiscoveryResult::NoReply if !self.replier_hop_counts.is_empty() => {
                Err(ModelError::InvalidOutcome("NoReply outcome lists repliers".into()))
            }
            DiscoveryResult::ReplyAtRing(k) if k == 0 || k > schedule.len() => {
                Err(ModelError::RingOutOfRange { ring: k, rings: schedule.len() })
            }
            _ if self.replier_hop_counts.contains(&0) => {
                Err(ModelError::InvalidOutcome("replier hop counts must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlrRecord {
    /// Last known hop count to the destination.
    pub min_repair_ttl: u32,
    /// Hops back to the sender of the undeliverable packet.
    pub hops_to_sender: u32,
    pub succeeded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsRecord {
    /// Nodes whose route cache is checked, from the node before the break
    /// up to the node that salvages.
    pub nodes_checked_to_salvor: u32,
    /// Nodes checked from the node before the break back to the originator.
    pub nodes_checked_to_origin: u32,
    pub succeeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rediscovery {
    pub outcome: DiscoveryOutcome,
    pub schedule: RingSchedule,
}

/// One link break and everything the protocol does about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaintenanceEvent {
    /// Seconds the broken link was in use before it failed.
    pub link_active_time: f64,
    pub route_hop_count: u32,
    pub rerr_transmissions: u32,
    pub llr: Option<LlrRecord>,
    pub ps: Option<PsRecord>,
    /// Seconds for the RERR to reach the originator.
    pub rerr_receive_time: f64,
    /// The originator's retry budget is spent, so no re-discovery follows.
    pub retries_expired: bool,
    pub rediscovery: Option<Rediscovery>,
}

impl Default for MaintenanceEvent {
    fn default() -> Self {
        Self {
            link_active_time: 0.0,
            route_hop_count: 0,
            rerr_transmissions: 0,
            llr: None,
            ps: None,
            rerr_receive_time: 0.0,
            retries_expired: false,
            rediscovery: None,
        }
    }
}

impl MaintenanceEvent {
    fn check_protocol(&self, protocol: Protocol) -> Result<(), ModelError> {
        let ok = match protocol {
            Protocol::Aodv => self.ps.is_none(),
            Protocol::Dsr => self.llr.is_none(),
            Protocol::Dymo => self.llr.is_none() && self.ps.is_none(),
        };
        if !ok || !(self.rerr_receive_time >= 0.0) || !(self.link_active_time >= 0.0) {
            return Err(ModelError::ProtocolMismatch(protocol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub e_rd: f64,
    pub e_rm: f64,
    pub t_rd: f64,
    pub t_rm: f64,
    pub e_total: f64,
    pub t_total: f64,
    /// Product of total energy and total time.
    pub c_total: f64,
}

/// Expected transmissions of a blind flood limited to `h` hops.
pub fn blind_flood_cost(h: u32, profile: &NetworkProfile) -> Result<f64, ModelError> {
    if h == 0 {
        return Err(ModelError::ZeroHops);
    }
    let needed = h as usize - 1;
    if profile.d_f.len() < needed {
        return Err(ModelError::ProfileMismatch { needed, available: profile.d_f.len() });
    }
    let p = profile.p_broadcast;
    let mut reach = 1.0;
    let mut p_pow = p;
    let mut deeper = 0.0;
    for d_f in &profile.d_f[..needed] {
        reach *= d_f;
        p_pow *= p;
        deeper += p_pow * reach;
    }
    Ok(p * profile.d_avg + profile.d_avg * deeper)
}

/// Cost of one expanding ring: a blind flood bounded by the ring's TTL.
pub fn ring_energy_cost(ttl: u32, profile: &NetworkProfile) -> Result<f64, ModelError> {
    blind_flood_cost(ttl, profile)
}

/// RREQ cost of a whole expanding-ring discovery.
pub fn ers_rreq_energy_cost(
    schedule: &RingSchedule,
    outcome: &DiscoveryOutcome,
    profile: &NetworkProfile,
) -> Result<f64, ModelError> {
    let rings = outcome.rings_paid(schedule)?;
    schedule.ttls[..rings]
        .iter()
        .map(|&ttl| ring_energy_cost(ttl, profile))
        .sum()
}

/// Discovery energy: RREQ rings plus one transmission per RREP hop.
pub fn rd_energy_cost(
    schedule: &RingSchedule,
    outcome: &DiscoveryOutcome,
    profile: &NetworkProfile,
) -> Result<f64, ModelError> {
    let rreq = ers_rreq_energy_cost(schedule, outcome, profile)?;
    let rrep: u32 = outcome.replier_hop_counts.iter().sum();
    Ok(rreq + f64::from(rrep))
}

/// HELLO beacons sent over the life of an active route. Zero for DSR.
pub fn link_monitor_cost(
    event: &MaintenanceEvent,
    constants: &ProtocolConstants,
) -> Result<f64, ModelError> {
    link_monitor(constants.protocol, event, constants)
}

fn link_monitor(
    protocol: Protocol,
    event: &MaintenanceEvent,
    constants: &ProtocolConstants,
) -> Result<f64, ModelError> {
    if !protocol.uses_hello() {
        return Ok(0.0);
    }
    if !(constants.hello_interval > 0.0) {
        return Err(ModelError::ZeroHelloInterval);
    }
    Ok(event.link_active_time / constants.hello_interval * f64::from(event.route_hop_count))
}

/// TTL of AODV's local repair ring. Half the hop count is rounded up before
/// the comparison so the TTL stays integral.
pub fn llr_ttl(min_repair_ttl: u32, hops_to_sender: u32, constants: &ProtocolConstants) -> u32 {
    min_repair_ttl.max(hops_to_sender.div_ceil(2)) + constants.local_add_ttl
}

pub fn llr_energy_cost(llr_ttl: u32, profile: &NetworkProfile) -> Result<f64, ModelError> {
    ring_energy_cost(llr_ttl, profile)
}

/// Route maintenance energy for one break.
///
/// AODV pays HELLOs, the local repair ring and RERRs; DSR pays one unit per
/// route cache probed while salvaging plus RERRs; DYMO pays HELLOs and RERRs.
pub fn rm_energy_cost(
    protocol: Protocol,
    event: &MaintenanceEvent,
    profile: &NetworkProfile,
    constants: &ProtocolConstants,
) -> Result<f64, ModelError> {
    event.check_protocol(protocol)?;
    let rerr = f64::from(event.rerr_transmissions);
    Ok(match protocol {
        Protocol::Aodv => {
            let llr = match &event.llr {
                Some(l) => {
                    llr_energy_cost(llr_ttl(l.min_repair_ttl, l.hops_to_sender, constants), profile)?
                }
                None => 0.0,
            };
            link_monitor(protocol, event, constants)? + llr + rerr
        }
        Protocol::Dsr => {
            let probes = event.ps.map_or(0, |ps| {
                if ps.succeeded {
                    ps.nodes_checked_to_salvor
                } else {
                    ps.nodes_checked_to_origin
                }
            });
            f64::from(probes) + rerr
        }
        Protocol::Dymo => link_monitor(protocol, event, constants)? + rerr,
    })
}

/// DSR discovery time: the non-propagating timeout, then doubling waits.
pub fn rd_time_cost_dsr(
    schedule: &RingSchedule,
    outcome: &DiscoveryOutcome,
    constants: &ProtocolConstants,
) -> Result<f64, ModelError> {
    let rings = outcome.rings_paid(schedule)?;
    let tau = constants.nonprop_request_timeout;
    Ok((0..rings).map(|i| 2f64.powi(i as i32) * tau).sum())
}

/// AODV/DYMO discovery time: each ring waits `2*NTT*(TTL + TIME_OUT_BUFFER)`.
pub fn rd_time_cost_aodv_dymo(
    schedule: &RingSchedule,
    outcome: &DiscoveryOutcome,
    constants: &ProtocolConstants,
) -> Result<f64, ModelError> {
    let rings = outcome.rings_paid(schedule)?;
    Ok(schedule.ttls[..rings]
        .iter()
        .map(|&ttl| ring_time(ttl, constants))
        .sum())
}

pub fn rd_time_cost(
    protocol: Protocol,
    schedule: &RingSchedule,
    outcome: &DiscoveryOutcome,
    constants: &ProtocolConstants,
) -> Result<f64, ModelError> {
    match protocol {
        Protocol::Dsr => rd_time_cost_dsr(schedule, outcome, constants),
        Protocol::Aodv | Protocol::Dymo => rd_time_cost_aodv_dymo(schedule, outcome, constants),
    }
}

fn ring_time(ttl: u32, constants: &ProtocolConstants) -> f64 {
    constants.ring_time_factor() * (f64::from(ttl) + constants.timeout_buffer)
}

/// Time spent in AODV's single local repair ring.
pub fn llr_time_cost(llr_ttl: u32, constants: &ProtocolConstants) -> f64 {
    ring_time(llr_ttl, constants)
}

/// Route maintenance time for one break.
pub fn rm_time_cost(
    protocol: Protocol,
    event: &MaintenanceEvent,
    constants: &ProtocolConstants,
) -> Result<f64, ModelError> {
    event.check_protocol(protocol)?;
    let rediscover = |rd: &Option<Rediscovery>| -> Result<f64, ModelError> {
        let rd = rd.as_ref().ok_or(ModelError::MissingRediscovery(protocol))?;
        rd_time_cost(protocol, &rd.schedule, &rd.outcome, constants)
    };
    match protocol {
        Protocol::Aodv => {
            let (repair, repaired) = match &event.llr {
                Some(l) => (
                    llr_time_cost(llr_ttl(l.min_repair_ttl, l.hops_to_sender, constants), constants),
                    l.succeeded,
                ),
                None => (0.0, false),
            };
            if repaired {
                Ok(repair)
            } else if event.retries_expired {
                Ok(repair + event.rerr_receive_time)
            } else {
                Ok(repair + event.rerr_receive_time + rediscover(&event.rediscovery)?)
            }
        }
        Protocol::Dsr => {
            let per_node = constants.ps_check_time_per_node;
            match event.ps {
                Some(ps) if ps.succeeded => Ok(f64::from(ps.nodes_checked_to_salvor) * per_node),
                ps => {
                    let walked = ps.map_or(0, |ps| ps.nodes_checked_to_origin);
                    Ok(f64::from(walked) * per_node + rediscover(&event.rediscovery)?)
                }
            }
        }
        Protocol::Dymo => {
            if event.retries_expired {
                Ok(event.rerr_receive_time)
            } else {
                Ok(event.rerr_receive_time + rediscover(&event.rediscovery)?)
            }
        }
    }
}

pub fn aggregate_costs(e_rd: f64, e_rm: f64, t_rd: f64, t_rm: f64) -> Result<CostBreakdown, ModelError> {
    if let Some(bad) = [e_rd, e_rm, t_rd, t_rm].into_iter().find(|v| !(*v >= 0.0)) {
        return Err(ModelError::NegativeInput(bad));
    }
    let e_total = e_rd + e_rm;
    let t_total = t_rd + t_rm;
    Ok(CostBreakdown {
        e_rd,
        e_rm,
        t_rd,
        t_rm,
        e_total,
        t_total,
        c_total: e_total * t_total,
    })
}
