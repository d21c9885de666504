use overhead_core::Protocol;
use overhead_sim::Ledger;
use serde::{Deserialize, Serialize};

/// Measurements from one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub protocol: Protocol,
    pub scenario: String,
    /// Sweep coordinate: pause time, node count or mean hop count.
    pub x: f64,
    pub seed: u64,
    pub rreq: u64,
    pub rrep: u64,
    pub rerr: u64,
    pub hello: u64,
    pub data_sent: u64,
    pub data_delivered: u64,
    /// Seconds, over delivered packets only.
    pub e2ed: Option<f64>,
    pub nrl: Option<f64>,
    pub mean_hops: Option<f64>,
    pub violations: Vec<String>,
    /// Beacon periods whose count strays from duration/interval by more than one.
    pub hello_mismatches: usize,
}

impl RunMetrics {
    pub fn from_ledger(protocol: Protocol, scenario: &str, x: f64, seed: u64, ledger: &Ledger, hello_interval: f64) -> Self {
        Self {
            protocol,
            scenario: scenario.to_string(),
            x,
            seed,
            rreq: ledger.rreq,
            rrep: ledger.rrep,
            rerr: ledger.rerr,
            hello: ledger.hello,
            data_sent: ledger.data_sent,
            data_delivered: ledger.data_delivered,
            e2ed: ledger.e2ed_mean(),
            nrl: ledger.nrl(),
            mean_hops: ledger.mean_hops(),
            violations: ledger.violations.clone(),
            hello_mismatches: ledger.hello_mismatches(hello_interval).len(),
        }
    }

    pub fn control_packets(&self) -> u64 {
        self.rreq + self.rrep + self.rerr + self.hello
    }
}

/// Per-run measurements and their arithmetic means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub runs: Vec<RunMetrics>,
    pub rreq: f64,
    pub rrep: f64,
    pub rerr: f64,
    pub hello: f64,
    pub data_sent: f64,
    pub data_delivered: f64,
    /// Mean over the runs that delivered anything.
    pub e2ed: Option<f64>,
    pub nrl: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl Metrics {
    pub fn aggregate(runs: Vec<RunMetrics>) -> Self {
        let m = |f: fn(&RunMetrics) -> u64| mean(runs.iter().map(|r| f(r) as f64)).unwrap_or(0.0);
        Self {
            rreq: m(|r| r.rreq),
            rrep: m(|r| r.rrep),
            rerr: m(|r| r.rerr),
            hello: m(|r| r.hello),
            data_sent: m(|r| r.data_sent),
            data_delivered: m(|r| r.data_delivered),
            e2ed: mean(runs.iter().filter_map(|r| r.e2ed)),
            nrl: mean(runs.iter().filter_map(|r| r.nrl)),
            runs,
        }
    }

    pub fn violations(&self) -> impl Iterator<Item = &String> {
        self.runs.iter().flat_map(|r| r.violations.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(rreq: u64, delivered: u64, nrl: Option<f64>) -> RunMetrics {
        RunMetrics {
            protocol: Protocol::Aodv,
            scenario: "t".into(),
            x: 0.0,
            seed: 0,
            rreq,
            rrep: 0,
            rerr: 0,
            hello: 0,
            data_sent: delivered,
            data_delivered: delivered,
            e2ed: nrl,
            nrl,
            mean_hops: None,
            violations: Vec::new(),
            hello_mismatches: 0,
        }
    }

    #[test]
    fn aggregate_is_mean_of_runs() {
        let m = Metrics::aggregate(vec![run(3, 2, Some(1.5)), run(6, 0, None), run(9, 4, Some(2.5))]);
        assert_eq!(m.rreq, 6.0);
        assert_eq!(m.data_delivered, 2.0);
        assert_eq!(m.nrl, Some(2.0));
    }

    #[test]
    fn undefined_without_deliveries() {
        let l = Ledger { rreq: 4, ..Ledger::default() };
        let r = RunMetrics::from_ledger(Protocol::Dymo, "t", 0.0, 0, &l, 1.0);
        assert_eq!(r.nrl, None);
        assert_eq!(r.e2ed, None);
        assert_eq!(Metrics::aggregate(vec![r]).nrl, None);
    }
}
