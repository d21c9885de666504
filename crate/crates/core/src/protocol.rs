use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The three reactive protocols covered by the model and the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Protocol {
    Aodv,
    Dsr,
    Dymo,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Aodv, Protocol::Dsr, Protocol::Dymo];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Aodv => "AODV",
            Protocol::Dsr => "DSR",
            Protocol::Dymo => "DYMO",
        }
    }

    /// AODV and DYMO monitor active links with HELLO beacons; DSR relies on
    /// link-layer feedback instead.
    pub fn uses_hello(self) -> bool {
        !matches!(self, Protocol::Dsr)
    }

    /// Intermediate nodes holding a route may answer a RREQ (not in DYMO).
    pub fn gratuitous_replies(self) -> bool {
        !matches!(self, Protocol::Dymo)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aodv" => Ok(Protocol::Aodv),
            "dsr" => Ok(Protocol::Dsr),
            "dymo" => Ok(Protocol::Dymo),
            other => Err(format!("unknown protocol `{other}` (expected aodv, dsr or dymo)")),
        }
    }
}
