//! Scenario batches, metrics and cross-checks between the analytic
//! routing-overhead model and the simulator.

pub mod compare;
pub mod config;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod output;
pub mod scenario;

pub use compare::{compare_model_vs_sim, ComparisonReport, Quantity};
pub use config::{load_config, parse_config, ScenarioConfig};
pub use error::HarnessError;
pub use metrics::{Metrics, RunMetrics};
pub use oracle::{flooding_oracle, network_flood_oracle, OracleEstimate};
pub use output::{emit_csv, emit_dat, format_sig, write_csv, CSV_COLUMNS};
pub use scenario::{desk, run_once, run_scenario, DeskScenario, XAxis};
