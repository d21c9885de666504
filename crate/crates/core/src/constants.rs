use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::protocol::Protocol;

/// Protocol timing and TTL constants shared by the cost model, the schedule
/// builder and the simulator.
///
/// Defaults follow the RFC values. `node_traversal_time`, `timeout_buffer`,
/// `hello_interval` and `ps_check_time_per_node` use the conventional AODV
/// defaults and stay configurable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConstants {
    pub protocol: Protocol,
    pub ttl_start: u32,
    pub ttl_increment: u32,
    pub ttl_threshold: u32,
    pub net_diameter: u32,
    /// RREQ_TRIES (AODV), RREQ_RETRIES (DYMO), MaxMainRexmt (DSR).
    pub rreq_retries: u32,
    /// DSR NonpropRequestTimeout, seconds.
    pub nonprop_request_timeout: f64,
    pub discovery_hop_limit: u32,
    pub node_traversal_time: f64,
    /// TIME_OUT_BUFFER, a dimensionless pad added to the ring TTL.
    pub timeout_buffer: f64,
    pub local_add_ttl: u32,
    pub hello_interval: f64,
    pub ps_check_time_per_node: f64,
}

impl Default for ProtocolConstants {
    fn default() -> Self {
        Self::aodv()
    }
}

impl ProtocolConstants {
    pub fn aodv() -> Self {
        Self {
            protocol: Protocol::Aodv,
            ttl_start: 2,
            ttl_increment: 2,
            ttl_threshold: 7,
            net_diameter: 35,
            rreq_retries: 2,
            nonprop_request_timeout: 0.030,
            discovery_hop_limit: 255,
            node_traversal_time: 0.040,
            timeout_buffer: 2.0,
            local_add_ttl: 2,
            hello_interval: 1.0,
            ps_check_time_per_node: 0.001,
        }
    }

    pub fn dymo() -> Self {
        Self {
            protocol: Protocol::Dymo,
            net_diameter: 10,
            rreq_retries: 3,
            ..Self::aodv()
        }
    }

    pub fn dsr() -> Self {
        Self {
            protocol: Protocol::Dsr,
            ttl_start: 1,
            ttl_increment: 1,
            ttl_threshold: 1,
            net_diameter: 255,
            rreq_retries: 2,
            ..Self::aodv()
        }
    }

    pub fn for_protocol(protocol: Protocol) -> Self {
        match protocol {
            Protocol::Aodv => Self::aodv(),
            Protocol::Dsr => Self::dsr(),
            Protocol::Dymo => Self::dymo(),
        }
    }

    /// TTL_START is 1 when link-layer feedback is available, 2 otherwise.
    /// DSR always opens with its one-hop non-propagating request.
    pub fn with_link_layer_feedback(mut self, feedback: bool) -> Self {
        if self.protocol != Protocol::Dsr {
            self.ttl_start = if feedback { 1 } else { 2 };
        }
        self
    }

    /// `2 * NODE_TRAVERSAL_TIME`, the per-TTL ring wait factor.
    pub fn ring_time_factor(&self) -> f64 {
        2.0 * self.node_traversal_time
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidConstants(msg));
        if self.ttl_start < 1 {
            return bad("ttl_start must be >= 1".into());
        }
        if self.ttl_increment < 1 {
            return bad("ttl_increment must be >= 1".into());
        }
        if self.ttl_threshold > self.net_diameter {
            return bad(format!(
                "ttl_threshold {} exceeds net_diameter {}",
                self.ttl_threshold, self.net_diameter
            ));
        }
        if self.protocol == Protocol::Dsr && self.discovery_hop_limit < 1 {
            return bad("discovery_hop_limit must be >= 1".into());
        }
        for (name, v) in [
            ("nonprop_request_timeout", self.nonprop_request_timeout),
            ("node_traversal_time", self.node_traversal_time),
            ("hello_interval", self.hello_interval),
            ("ps_check_time_per_node", self.ps_check_time_per_node),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.timeout_buffer >= 0.0 && self.timeout_buffer.is_finite()) {
            return bad(format!("timeout_buffer must be non-negative, got {}", self.timeout_buffer));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for p in Protocol::ALL {
            ProtocolConstants::for_protocol(p).validate().unwrap();
        }
    }

    #[test]
    fn threshold_above_diameter_rejected() {
        let c = ProtocolConstants { ttl_threshold: 40, ..ProtocolConstants::aodv() };
        assert!(matches!(c.validate(), Err(ModelError::InvalidConstants(_))));
    }

    #[test]
    fn link_layer_feedback_sets_ttl_start() {
        assert_eq!(ProtocolConstants::aodv().with_link_layer_feedback(true).ttl_start, 1);
        assert_eq!(ProtocolConstants::dymo().with_link_layer_feedback(false).ttl_start, 2);
        assert_eq!(ProtocolConstants::dsr().with_link_layer_feedback(false).ttl_start, 1);
    }
}
