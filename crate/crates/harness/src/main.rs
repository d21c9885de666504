use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use overhead_core::{blind_flood_cost, build_schedule, Protocol, ProtocolConstants};
use overhead_harness::scenario::{run_scenario_with, DeskScenario, XAxis};
use overhead_harness::{
    compare_model_vs_sim, desk, emit_csv, emit_dat, load_config, network_flood_oracle, write_csv, HarnessError,
    RunMetrics, ScenarioConfig,
};
use overhead_sim::netsim::profile::network_eccentricity;
use overhead_sim::netsim::rng::derive_seed;
use overhead_sim::{measure_network_profile, Topology};

#[derive(Parser)]
#[command(name = "overhead", version, about = "Routing-overhead model and MANET simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Aodv,
    Dsr,
    Dymo,
    All,
}

impl ProtocolArg {
    fn protocols(self) -> Vec<Protocol> {
        match self {
            ProtocolArg::Aodv => vec![Protocol::Aodv],
            ProtocolArg::Dsr => vec![Protocol::Dsr],
            ProtocolArg::Dymo => vec![Protocol::Dymo],
            ProtocolArg::All => Protocol::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Chain,
    K4,
    Ring,
    Grid,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Run a desk scenario (1, 2, 3) or a named scenario from --config.
    Run {
        #[arg(long)]
        scenario: String,
        #[arg(long, value_enum, default_value = "all")]
        protocol: ProtocolArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write gnuplot-ready columns here.
        #[arg(long)]
        dat: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the event trace of the first run here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare one simulated discovery against the cost model.
    Compare {
        #[arg(long, value_enum, default_value = "chain")]
        topology: TopologyArg,
        #[arg(long, value_enum, default_value = "dymo")]
        protocol: ProtocolArg,
        #[arg(long, default_value_t = 20)]
        nodes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Monte-Carlo flooding oracle against the blind-flood formula.
    Oracle {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        nodes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000.0)]
        size: f64,
        #[arg(long, default_value_t = 250.0)]
        range: f64,
    },
    /// Print a protocol's expanding-ring schedule.
    DumpSchedule {
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { scenario, protocol, seed, runs, out, dat, config, trace } => {
            let rows = run_rows(&scenario, protocol, seed, runs, config, trace)?;
            match out {
                Some(path) => emit_csv(&rows, &path)?,
                None => write_csv(&rows, std::io::stdout().lock())
                    .map_err(|source| HarnessError::Csv { path: "<stdout>".into(), source })?,
            }
            if let Some(path) = dat {
                emit_dat(&rows, &path)?;
            }
            Ok(())
        }
        Command::Compare { topology, protocol, nodes, seed, p } => {
            let (topo, source, target) = match topology {
                TopologyArg::Chain => (Topology::chain(3, 100.0, 150.0), 0, 2),
                TopologyArg::K4 => (Topology::complete(4, 100.0), 0, 3),
                TopologyArg::Ring => (Topology::ring(8, 100.0), 0, 4),
                TopologyArg::Grid => (Topology::grid(3, 3, 100.0, 100.0), 0, 8),
                TopologyArg::Random => (Topology::generate(nodes, 1000.0, 1000.0, 250.0, seed), 0, nodes.saturating_sub(1)),
            };
            for proto in protocol.protocols() {
                let r = compare_model_vs_sim(&topo, source, target, proto, p, seed)?;
                println!("{proto} {source}->{target} outcome {:?} d_avg {:.4} d_f {:?}", r.outcome.result, r.profile.d_avg, r.profile.d_f);
                println!("quantity\tanalytic\tsimulated\trel_error");
                for q in &r.quantities {
                    println!("{}\t{:.6}\t{:.6}\t{:.4}", q.name, q.analytic, q.simulated, q.relative_error);
                }
            }
            Ok(())
        }
        Command::Oracle { p, trials, nodes, seed, size, range } => {
            let topo = Topology::generate(nodes, size, size, range, seed);
            let h = network_eccentricity(&topo);
            let per_source = (trials / nodes.max(1)).max(1);
            let oracle = network_flood_oracle(&topo, p, per_source, seed);
            println!("nodes {nodes} eccentricity {h} mean_degree {:.4}", topo.mean_degree());
            println!("oracle rebroadcasts {:.4} +/- {:.4} ({} floods)", oracle.mean, oracle.stderr, oracle.trials);
            if h > 0 {
                let profile = measure_network_profile(&topo, p)?;
                let model = blind_flood_cost(h, &profile)?;
                println!("model {:.4} relative_error {:.4}", model, (oracle.mean - model).abs() / model.max(1.0));
            }
            Ok(())
        }
        Command::DumpSchedule { protocol } => {
            let mut out = std::io::stdout().lock();
            for proto in protocol.protocols() {
                let schedule = build_schedule(&ProtocolConstants::for_protocol(proto))?;
                write!(out, "{schedule}").and_then(|_| writeln!(out)).map_err(|source| HarnessError::Io { path: "<stdout>".into(), source })?;
            }
            Ok(())
        }
    }
}

fn run_rows(
    scenario: &str,
    protocol: ProtocolArg,
    seed: u64,
    runs: usize,
    config: Option<PathBuf>,
    trace: Option<PathBuf>,
) -> Result<Vec<RunMetrics>, HarnessError> {
    let protocols = protocol.protocols();
    let desk_scenario = scenario.parse::<u32>().ok().and_then(DeskScenario::from_index);
    let (points, axis): (Vec<ScenarioConfig>, XAxis) = match (&config, desk_scenario) {
        (Some(path), _) => {
            let mut all = load_config(path)?;
            let cfg = all.remove(scenario).ok_or_else(|| HarnessError::Config(format!("no scenario `{scenario}` in {}", path.display())))?;
            (vec![cfg], XAxis::Pause)
        }
        (None, Some(d)) => (d.points(seed, runs), d.x_axis()),
        (None, None) => return Err(HarnessError::Config(format!("unknown scenario `{scenario}`; use 1, 2, 3 or --config"))),
    };
    if let Some(path) = trace {
        let first = &points[0];
        let mut sim = overhead_harness::scenario::build_simulation(first, protocols[0], derive_seed(first.seed, 0))?;
        sim.set_trace(true);
        sim.run();
        let io = |source| HarnessError::Io { path: path.clone(), source };
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(io)?);
        for line in sim.trace() {
            writeln!(f, "{line}").map_err(io)?;
        }
    }
    match (config.is_some(), desk_scenario) {
        (false, Some(d)) => desk(d, &protocols, seed, runs),
        _ => {
            let mut rows = Vec::new();
            for proto in protocols {
                for cfg in &points {
                    let cfg = ScenarioConfig { protocol: proto, ..cfg.clone() };
                    rows.extend(run_scenario_with(&cfg, axis)?.runs);
                }
            }
            Ok(rows)
        }
    }
}
