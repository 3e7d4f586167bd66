//! Command-line front end: `run`, `sweep`, `compare` and `gen-topology`.
//!
//! [`execute`] returns the process exit code: 0 on success, 1 for bad input (arguments,
//! scenario or topology files), 2 when a run or an output write fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use drr_mdpf::metrics::{write_csv, write_report, MetricsReport, ReportFormat};
use drr_mdpf::sim::{random_topology, LinkParams};
use drr_mdpf::{load_scenario, parse_override, run_scenario, Scenario, StrategyKind};
use rayon::prelude::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Default sweep points, matching the evaluation axes.
pub const DEFAULT_RATES: [f64; 5] = [2000.0, 2500.0, 3000.0, 3500.0, 4000.0];
pub const DEFAULT_CACHE_FRACTIONS: [f64; 5] = [0.01, 0.15, 0.30, 0.45, 0.60];
pub const DEFAULT_STRATEGIES: &str = "drr-mdpf,best-route,uniform-random,rfa-like,saf-like";

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<drr_mdpf::Error> for CliError {
    fn from(e: drr_mdpf::Error) -> Self {
        use drr_mdpf::Error as E;
        match e {
            E::Usage(_) | E::Parse { .. } | E::Config(_) => CliError::Usage(e.to_string()),
            E::Runtime(_) | E::Convergence { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "drr-mdpf", version, about = "NDN forwarding simulator with DRR-MDPF and baseline strategies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its metrics.
    Run(RunArgs),
    /// Run a scenario over a range of one parameter for several strategies.
    Sweep(SweepArgs),
    /// Run a scenario once per strategy.
    Compare(CompareArgs),
    /// Write a random connected topology.
    GenTopology(GenArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file.
    #[arg(long, short = 's')]
    scenario: PathBuf,
    /// Replaces the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value`, applied as if written in the scenario file. Repeatable.
    #[arg(long = "override", short = 'o', value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Param {
    Rate,
    CacheFrac,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    #[arg(long, value_enum)]
    param: Param,
    /// Comma-separated points. Defaults to 2000..4000 for rate, 0.01..0.60 for cache_frac.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_STRATEGIES)]
    strategies: Vec<String>,
    /// Seeds to run at every point; the scenario seed when omitted.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    seeds: Vec<u64>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_STRATEGIES)]
    strategies: Vec<String>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value_t = 40)]
    nodes: usize,
    #[arg(long, default_value_t = 122)]
    links: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Link bandwidth in bits per second.
    #[arg(long, default_value_t = 10e6)]
    bandwidth: f64,
    #[arg(long, default_value_t = 10.0)]
    delay_ms: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (program name first) and runs the command, printing to the process streams.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    execute_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`execute`] with explicit output streams.
pub fn execute_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if shown {
                let _ = write!(out, "{text}");
                return EXIT_OK;
            }
            let _ = write!(err, "{text}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Run(a) => {
            let s = scenario(&a.common)?;
            let report = run_scenario(&s)?;
            let format = match a.format {
                Format::Csv => ReportFormat::Csv,
                Format::Text => ReportFormat::Text,
            };
            emit(a.common.out.as_deref(), &write_report(&report, format), out)
        }
        Command::Sweep(a) => {
            let base = scenario(&a.common)?;
            let strategies = strategies(&a.strategies)?;
            let values = sweep_values(a.param, &a.values)?;
            let seeds = if a.seeds.is_empty() { vec![base.seed] } else { distinct(&a.seeds, "seed")? };
            let mut jobs = Vec::new();
            for &strategy in &strategies {
                for &v in &values {
                    for &seed in &seeds {
                        let mut s = base.clone();
                        s.strategy = strategy;
                        s.seed = seed;
                        match a.param {
                            Param::Rate => s.interest_rate = v,
                            Param::CacheFrac => s.cache_fraction = v,
                        }
                        s.validate()?;
                        jobs.push(s);
                    }
                }
            }
            let mut reports = run_all(&jobs)?;
            let key = |r: &MetricsReport| match a.param {
                Param::Rate => r.label.rate,
                Param::CacheFrac => r.label.cache_frac,
            };
            reports.sort_by(|x, y| {
                x.label
                    .strategy
                    .cmp(&y.label.strategy)
                    .then(key(x).total_cmp(&key(y)))
                    .then(x.label.seed.cmp(&y.label.seed))
            });
            emit(a.common.out.as_deref(), &write_csv(&reports), out)
        }
        Command::Compare(a) => {
            let base = scenario(&a.common)?;
            let jobs: Vec<Scenario> = strategies(&a.strategies)?
                .into_iter()
                .map(|strategy| Scenario { strategy, ..base.clone() })
                .collect();
            let reports = run_all(&jobs)?;
            emit(a.common.out.as_deref(), &write_csv(&reports), out)
        }
        Command::GenTopology(a) => {
            let link = LinkParams { bandwidth_bps: a.bandwidth, delay: a.delay_ms / 1000.0 };
            let topo = random_topology(a.nodes, a.links, a.seed, link)?;
            emit(a.out.as_deref(), topo.to_string().as_bytes(), out)
        }
    }
}

fn scenario(a: &ScenarioArgs) -> CliResult<Scenario> {
    let overrides = a
        .overrides
        .iter()
        .map(|o| parse_override(o))
        .collect::<Result<Vec<_>, _>>()?;
    let mut s = load_scenario(&a.scenario, &overrides)?;
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    // resolve the topology up front so a bad file is a usage error, not a failed run
    s.resolve_topology()?;
    Ok(s)
}

fn strategies(names: &[String]) -> CliResult<Vec<StrategyKind>> {
    let kinds = names
        .iter()
        .map(|n| n.trim().parse::<StrategyKind>())
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err(CliError::Usage("no strategies given".into()));
    }
    distinct(&kinds, "strategy")
}

fn sweep_values(param: Param, given: &[f64]) -> CliResult<Vec<f64>> {
    if given.is_empty() {
        return Ok(match param {
            Param::Rate => DEFAULT_RATES.to_vec(),
            Param::CacheFrac => DEFAULT_CACHE_FRACTIONS.to_vec(),
        });
    }
    distinct(given, "value")
}

/// Rejects repeated entries so that every output row is unique.
fn distinct<T: PartialEq + Copy + std::fmt::Debug>(items: &[T], what: &str) -> CliResult<Vec<T>> {
    for (i, x) in items.iter().enumerate() {
        if items[..i].contains(x) {
            return Err(CliError::Usage(format!("duplicate {what} {x:?}")));
        }
    }
    Ok(items.to_vec())
}

/// Runs independent scenarios concurrently and returns reports in input order.
fn run_all(jobs: &[Scenario]) -> CliResult<Vec<MetricsReport>> {
    let results: Vec<_> = jobs.par_iter().map(run_scenario).collect();
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

/// Writes `bytes` to `path` atomically, or to `out` when no path is given.
fn emit(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> CliResult<()> {
    let Some(path) = path else {
        return out
            .write_all(bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write output: {e}")));
    };
    let io = |e: std::io::Error| CliError::Runtime(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
