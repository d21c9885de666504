use std::collections::BTreeMap;
use std::path::Path;

use overhead_core::{Protocol, ProtocolConstants};
use overhead_sim::RouterConfig;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// One scenario point. Per-protocol tables override individual constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub width: f64,
    pub height: f64,
    pub nodes: usize,
    /// Node speed in m/s.
    pub speed: f64,
    pub pause: f64,
    pub duration: f64,
    pub flows: usize,
    pub packet_size: usize,
    /// Packets per second per flow.
    pub packet_rate: f64,
    pub link_rate: f64,
    pub radio_range: f64,
    /// Propagation and processing delay per hop, seconds.
    pub per_hop_delay: f64,
    pub flow_start_min: f64,
    pub flow_start_max: f64,
    pub protocol: Protocol,
    pub seed: u64,
    pub runs: usize,
    pub router: RouterConfig,
    pub aodv: toml::Table,
    pub dsr: toml::Table,
    pub dymo: toml::Table,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "custom".into(),
            width: 500.0,
            height: 500.0,
            nodes: 20,
            speed: 0.0,
            pause: 0.0,
            duration: 60.0,
            flows: 1,
            packet_size: 512,
            packet_rate: 4.0,
            link_rate: 2.0e6,
            radio_range: 250.0,
            per_hop_delay: 0.001,
            flow_start_min: 1.0,
            flow_start_max: 10.0,
            protocol: Protocol::Aodv,
            seed: 1,
            runs: 5,
            router: RouterConfig::default(),
            aodv: toml::Table::new(),
            dsr: toml::Table::new(),
            dymo: toml::Table::new(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let positive = [
            ("width", self.width),
            ("height", self.height),
            ("duration", self.duration),
            ("packet_rate", self.packet_rate),
            ("link_rate", self.link_rate),
            ("radio_range", self.radio_range),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(HarnessError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("speed", self.speed), ("pause", self.pause), ("per_hop_delay", self.per_hop_delay)] {
            if !(v >= 0.0) {
                return Err(HarnessError::Config(format!("{name} must not be negative, got {v}")));
            }
        }
        if self.nodes == 0 || self.runs == 0 || self.packet_size == 0 {
            return Err(HarnessError::Config("nodes, runs and packet_size must be at least 1".into()));
        }
        if self.flow_start_max < self.flow_start_min {
            return Err(HarnessError::Config("flow_start_max is below flow_start_min".into()));
        }
        for p in Protocol::ALL {
            self.constants_for(p)?.validate()?;
        }
        Ok(())
    }

    /// Protocol defaults with this scenario's overrides applied.
    pub fn constants_for(&self, protocol: Protocol) -> Result<ProtocolConstants, HarnessError> {
        let overrides = match protocol {
            Protocol::Aodv => &self.aodv,
            Protocol::Dsr => &self.dsr,
            Protocol::Dymo => &self.dymo,
        };
        let base = ProtocolConstants::for_protocol(protocol);
        if overrides.is_empty() {
            return Ok(base);
        }
        let mut table = toml::Table::try_from(&base).map_err(|e| HarnessError::Config(e.to_string()))?;
        for (k, v) in overrides {
            if !table.contains_key(k) {
                return Err(HarnessError::Config(format!("unknown {protocol} constant `{k}`")));
            }
            if k == "protocol" {
                return Err(HarnessError::Config("a constants table cannot change its protocol".into()));
            }
            table.insert(k.clone(), v.clone());
        }
        Ok(table.try_into()?)
    }
}

/// Parses `[name]` sections into scenarios keyed by section name.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, ScenarioConfig>, HarnessError> {
    let raw: BTreeMap<String, ScenarioConfig> = toml::from_str(text)?;
    let mut out = BTreeMap::new();
    for (name, mut cfg) in raw {
        cfg.name = name.clone();
        cfg.validate()?;
        out.insert(name, cfg);
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, ScenarioConfig>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_overrides() {
        let text = r#"
[small]
width = 300
height = 200
nodes = 8
runs = 2

[small.dsr]
nonprop_request_timeout = 0.05

[small.router]
allowed_hello_loss = 3
"#;
        let cfgs = parse_config(text).unwrap();
        let c = &cfgs["small"];
        assert_eq!(c.name, "small");
        assert_eq!((c.width, c.nodes, c.runs), (300.0, 8, 2));
        assert_eq!(c.router.allowed_hello_loss, 3);
        let dsr = c.constants_for(Protocol::Dsr).unwrap();
        assert_eq!(dsr.nonprop_request_timeout, 0.05);
        assert_eq!(dsr.ttl_start, 1);
        assert_eq!(c.constants_for(Protocol::Dymo).unwrap(), ProtocolConstants::dymo());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_config("[a]\nruns = 0\n").is_err());
        assert!(parse_config("[a]\nwidth = -1\n").is_err());
        assert!(parse_config("[a]\nbogus = 1\n").is_err());
        assert!(parse_config("[a.aodv]\nbogus = 1\n").is_err());
        assert!(parse_config("[a.aodv]\nttl_threshold = 99\n").is_err());
    }
}
