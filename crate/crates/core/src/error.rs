use thiserror::Error;

use crate::protocol::Protocol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("hop count must be at least 1")]
    ZeroHops,
    #[error("profile has {available} forward-degree entries, {needed} required")]
    ProfileMismatch { needed: usize, available: usize },
    #[error("invalid network profile: {0}")]
    InvalidProfile(String),
    #[error("reply ring {ring} is outside a schedule of {rings} rings")]
    RingOutOfRange { ring: usize, rings: usize },
    #[error("ring index must be at least 1")]
    ZeroRingIndex,
    #[error("hello interval must be positive")]
    ZeroHelloInterval,
    #[error("maintenance event does not match protocol {0}")]
    ProtocolMismatch(Protocol),
    #[error("{0} maintenance branch requires re-discovery data")]
    MissingRediscovery(Protocol),
    #[error("cost inputs must be non-negative, got {0}")]
    NegativeInput(f64),
    #[error("invalid protocol constants: {0}")]
    InvalidConstants(String),
    #[error("invalid discovery outcome: {0}")]
    InvalidOutcome(String),
}
