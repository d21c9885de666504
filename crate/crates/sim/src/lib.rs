//! Deterministic discrete-event simulator for reactive MANET routing.
//!
//! [`netsim`] provides the substrate (clock, event queue, unit-disk
//! topology, random-waypoint mobility, CBR traffic, per-hop delivery) and
//! [`protocols`] the AODV, DSR and DYMO control planes that run on it.
//! A [`Simulation`] ties the two together for a single seeded run.

pub mod error;
pub mod fixtures;
pub mod ledger;
pub mod netsim;
pub mod packet;
pub mod protocols;
pub mod sim;

pub use error::SimError;
pub use ledger::{DiscoveryRecord, Ledger};
pub use netsim::event::EventQueue;
pub use netsim::mobility::{MobilityConfig, RandomWaypoint};
pub use netsim::profile::{measure_network_profile, measure_profile};
pub use netsim::radio::RadioConfig;
pub use netsim::topology::{Point, Topology};
pub use netsim::traffic::CbrFlow;
pub use protocols::RouterConfig;
pub use sim::{SimConfig, Simulation};

/// Index of a node in the topology.
pub type NodeId = usize;
