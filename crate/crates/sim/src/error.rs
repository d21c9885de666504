use overhead_core::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot schedule an event at {at}s, clock is already at {now}s")]
    PastEvent { at: f64, now: f64 },
    #[error("node {0} is not in the topology")]
    UnknownNode(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
