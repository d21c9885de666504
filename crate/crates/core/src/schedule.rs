//! Expanding-ring search schedules.
//!
//! A schedule is the ordered list of RREQ rings an originator walks through
//! during one route discovery: the TTL of each ring and how long the
//! originator waits for a reply before moving on. Retries after the TTL
//! threshold appear as extra full-diameter rings, so every discovery sum in
//! the cost model is indexable by ring.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::ProtocolConstants;
use crate::error::ModelError;
use crate::protocol::Protocol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingSchedule {
    pub protocol: Protocol,
    pub ttls: Vec<u32>,
    /// Seconds to wait for a reply after sending the ring, same length as `ttls`.
    pub timeouts: Vec<f64>,
    /// Extra full-diameter attempts appended after the first one.
    pub retries_at_max: u32,
    /// NET_DIAMETER, or DiscoveryHopLimit for DSR.
    pub max_ttl_cap: u32,
}

impl RingSchedule {
    pub fn len(&self) -> usize {
        self.ttls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ttls.is_empty()
    }

    /// TTL of ring `ring` (1-based).
    pub fn ttl(&self, ring: usize) -> Option<u32> {
        ring.checked_sub(1).and_then(|i| self.ttls.get(i).copied())
    }

    pub fn timeout(&self, ring: usize) -> Option<f64> {
        ring.checked_sub(1).and_then(|i| self.timeouts.get(i).copied())
    }

    /// Whether the first ring is DSR's non-propagating request.
    pub fn non_propagating_first(&self) -> bool {
        self.protocol == Protocol::Dsr && self.ttls.first() == Some(&1)
    }

    /// Total time an originator waits before declaring the discovery failed.
    pub fn total_wait(&self) -> f64 {
        self.timeouts.iter().sum()
    }
}

impl fmt::Display for RingSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {} expanding ring schedule (cap {})", self.protocol, self.max_ttl_cap)?;
        writeln!(f, "ring\tttl\ttimeout_s")?;
        for (i, (ttl, t)) in self.ttls.iter().zip(&self.timeouts).enumerate() {
            writeln!(f, "{}\t{}\t{:.6}", i + 1, ttl, t)?;
        }
        Ok(())
    }
}

/// Binary exponential backoff: `2^(i-1) * tau` for ring index `i >= 1`.
pub fn beb_timeout(ring_index: u32, tau: f64) -> Result<f64, ModelError> {
    if ring_index == 0 {
        return Err(ModelError::ZeroRingIndex);
    }
    Ok(2f64.powi(ring_index as i32 - 1) * tau)
}

pub fn build_schedule(constants: &ProtocolConstants) -> Result<RingSchedule, ModelError> {
    constants.validate()?;
    match constants.protocol {
        Protocol::Aodv | Protocol::Dymo => Ok(build_ers(constants)),
        Protocol::Dsr => build_dsr(constants),
    }
}

fn build_ers(c: &ProtocolConstants) -> RingSchedule {
    let mut ttls = Vec::new();
    let mut ttl = c.ttl_start;
    while ttl <= c.ttl_threshold {
        ttls.push(ttl);
        ttl += c.ttl_increment;
    }
    ttls.extend(std::iter::repeat_n(c.net_diameter, 1 + c.rreq_retries as usize));
    let timeouts = ttls
        .iter()
        .map(|&t| c.ring_time_factor() * (f64::from(t) + c.timeout_buffer))
        .collect();
    RingSchedule {
        protocol: c.protocol,
        ttls,
        timeouts,
        retries_at_max: c.rreq_retries,
        max_ttl_cap: c.net_diameter,
    }
}

// One non-propagating ring with a flat timeout, then the propagating
// request and its retransmissions with doubling timeouts.
fn build_dsr(c: &ProtocolConstants) -> Result<RingSchedule, ModelError> {
    let tau = c.nonprop_request_timeout;
    let mut ttls = vec![1];
    let mut timeouts = vec![tau];
    for attempt in 1..=1 + c.rreq_retries {
        ttls.push(c.discovery_hop_limit);
        timeouts.push(beb_timeout(attempt, tau)?);
    }
    Ok(RingSchedule {
        protocol: Protocol::Dsr,
        ttls,
        timeouts,
        retries_at_max: c.rreq_retries,
        max_ttl_cap: c.discovery_hop_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn aodv_default_rings() {
        let s = build_schedule(&ProtocolConstants::aodv()).unwrap();
        assert_eq!(s.ttls, vec![2, 4, 6, 35, 35, 35]);
        assert_eq!(s.retries_at_max, 2);
        assert_eq!(s.max_ttl_cap, 35);
        let expect: Vec<f64> = [2.0, 4.0, 6.0, 35.0, 35.0, 35.0]
            .iter()
            .map(|t| 0.08 * (t + 2.0))
            .collect();
        for (a, b) in s.timeouts.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dymo_default_rings() {
        let s = build_schedule(&ProtocolConstants::dymo()).unwrap();
        assert_eq!(s.ttls, vec![2, 4, 6, 10, 10, 10, 10]);
    }

    #[test]
    fn dsr_default_rings() {
        let s = build_schedule(&ProtocolConstants::dsr()).unwrap();
        assert_eq!(s.ttls, vec![1, 255, 255, 255]);
        assert_eq!(s.timeouts, vec![0.030, 0.030, 0.060, 0.120]);
        assert!(s.non_propagating_first());
    }

    #[test]
    fn link_layer_feedback_start() {
        let c = ProtocolConstants::aodv().with_link_layer_feedback(true);
        let s = build_schedule(&c).unwrap();
        assert_eq!(s.ttls, vec![1, 3, 5, 7, 35, 35, 35]);
    }

    #[test]
    fn beb_examples() {
        assert_eq!(beb_timeout(1, 0.030).unwrap(), 0.030);
        assert_eq!(beb_timeout(2, 0.030).unwrap(), 0.060);
        assert!((beb_timeout(4, 0.030).unwrap() - 0.240).abs() < 1e-15);
        assert_eq!(beb_timeout(0, 0.030), Err(ModelError::ZeroRingIndex));
    }

    #[test]
    fn inconsistent_constants_rejected() {
        let c = ProtocolConstants { ttl_threshold: 12, ..ProtocolConstants::dymo() };
        assert!(build_schedule(&c).is_err());
    }

    #[test]
    fn dump_format_lists_each_ring() {
        let s = build_schedule(&ProtocolConstants::dsr()).unwrap();
        let text = s.to_string();
        assert_eq!(text.lines().count(), 2 + 4);
        assert!(text.contains("2\t255\t0.030000"));
    }

    proptest! {
        #[test]
        fn schedules_respect_invariants(
            start in 1u32..6, inc in 1u32..4, thr in 1u32..12, extra in 0u32..30, retries in 0u32..5,
        ) {
            let c = ProtocolConstants {
                ttl_start: start,
                ttl_increment: inc,
                ttl_threshold: thr,
                net_diameter: thr + extra,
                rreq_retries: retries,
                ..ProtocolConstants::aodv()
            };
            let s = build_schedule(&c).unwrap();
            prop_assert_eq!(&s, &build_schedule(&c).unwrap());
            prop_assert_eq!(s.ttls.len(), s.timeouts.len());
            prop_assert!(s.ttls.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(s.ttls.iter().all(|&t| t <= s.max_ttl_cap));
            prop_assert_eq!(*s.ttls.last().unwrap(), s.max_ttl_cap);
            let at_max = s.ttls.iter().filter(|&&t| t == c.net_diameter).count();
            prop_assert!(at_max as u32 > retries);
        }
    }
}
