//! Routing-overhead model for reactive MANET protocols.
//!
//! The crate evaluates the energy (packet transmissions) and time (seconds)
//! paid by AODV, DSR and DYMO during route discovery and route maintenance,
//! and builds the expanding-ring search schedules those protocols use.
//! Everything here is a pure function of its inputs.

pub mod constants;
pub mod cost;
pub mod error;
pub mod profile;
pub mod protocol;
pub mod schedule;

pub use constants::ProtocolConstants;
pub use cost::{
    aggregate_costs, blind_flood_cost, ers_rreq_energy_cost, link_monitor_cost, llr_energy_cost,
    llr_time_cost, llr_ttl, rd_energy_cost, rd_time_cost, rd_time_cost_aodv_dymo,
    rd_time_cost_dsr, ring_energy_cost, rm_energy_cost, rm_time_cost, CostBreakdown,
    DiscoveryOutcome, DiscoveryResult, LlrRecord, MaintenanceEvent, PsRecord, Rediscovery,
};
pub use error::ModelError;
pub use profile::NetworkProfile;
pub use protocol::Protocol;
pub use schedule::{beb_timeout, build_schedule, RingSchedule};
