//! Command-line front end for split diagnostics.
//!
//! Subcommands: `diagnose` (hypothesis test for one split), `split` (produce
//! a split file), `compare` (several strategies against one shared null
//! sample), `sweep` (distance-vs-model-performance association).
//!
//! Exit codes: 0 = accepted / success, 2 = split rejected, 1 = error.

mod commands;
mod plot;

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "splitdiag",
    version,
    about = "Diagnose the quality of a train/test split",
    after_help = "Exit codes: 0 split accepted (or command succeeded), \
                  2 split rejected, 1 error.\n\
                  Flag values override the --config file, which overrides defaults."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test one split against the simulated null distribution of the
    /// distance metric
    Diagnose(CommonArgs),
    /// Produce a split with a chosen strategy and write it as a split CSV
    Split(CommonArgs),
    /// Diagnose several strategies (and optionally an external split file)
    /// against a shared null sample
    Compare(CommonArgs),
    /// Re-split repeatedly, fitting the model each time, to associate the
    /// distance metric with model performance
    Sweep(CommonArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Dataset CSV (mandatory header row)
    #[arg(long)]
    data: Option<PathBuf>,

    /// Field delimiter of the dataset CSV
    #[arg(long)]
    delimiter: Option<char>,

    /// Metric columns, comma separated; `a:b` is a product column, `a^k` a
    /// power column. Default: formula columns, else all numeric columns.
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,

    /// Regression formula, e.g. "Rings ~ LongestShell + Diameter + Height"
    #[arg(long)]
    formula: Option<String>,

    /// Split strategy: random | stratified | adversarial | cluster | cadex | duplex
    #[arg(long)]
    strategy: Option<String>,

    /// Strategies for `compare`, comma separated
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,

    /// Stratum / sort / group column for stratified, adversarial and cluster
    #[arg(long)]
    key_column: Option<String>,

    /// Externally produced split CSV (row_index,partition)
    #[arg(long)]
    split_file: Option<PathBuf>,

    /// Train fraction in (0,1)
    #[arg(long)]
    fraction: Option<f64>,

    /// Significance level of the one-sided test
    #[arg(long)]
    alpha: Option<f64>,

    /// Number of Monte Carlo simulations
    #[arg(long)]
    sims: Option<usize>,

    /// Master seed; strategy and simulation seeds derive from it
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for report.json, CSV and SVG artifacts
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write SVG plots
    #[arg(long)]
    plot: bool,

    /// Cap the number of parallel workers (0 or unset = automatic)
    #[arg(long)]
    workers: Option<usize>,

    /// Config file with key=value lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Pool the observed distance into the stored null sample
    #[arg(long)]
    include_observed: bool,

    /// Omit the null sample array from report.json
    #[arg(long)]
    elide_null_sample: bool,
}

/// Fully resolved configuration: flags over config file over defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub data: PathBuf,
    pub delimiter: u8,
    pub columns: Option<Vec<String>>,
    pub formula: Option<String>,
    pub strategy: Option<String>,
    pub strategies: Vec<String>,
    pub key_column: Option<String>,
    pub split_file: Option<PathBuf>,
    pub fraction: f64,
    pub alpha: f64,
    pub sims: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub plot: bool,
    pub workers: Option<usize>,
    pub include_observed: bool,
    pub elide_null_sample: bool,
}

fn parse_config_file(path: &PathBuf) -> anyhow::Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            anyhow::anyhow!("{}:{}: expected key=value", path.display(), lineno + 1)
        })?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

impl CommonArgs {
    fn resolve(&self) -> anyhow::Result<Resolved> {
        let cfg = match &self.config {
            Some(p) => parse_config_file(p)?,
            None => HashMap::new(),
        };
        let get = |key: &str| cfg.get(key).cloned();
        let parse_as = |key: &str, v: String| -> anyhow::Result<String> {
            let _ = key;
            Ok(v)
        };
        let _ = parse_as;

        macro_rules! merged {
            ($field:expr, $key:literal) => {
                $field.clone().or_else(|| {
                    get($key).and_then(|v| v.parse().ok())
                })
            };
        }

        let columns = self.columns.clone().or_else(|| {
            get("columns").map(|v| v.split(',').map(|s| s.trim().to_string()).collect())
        });
        let strategies = self.strategies.clone().or_else(|| {
            get("strategies").map(|v| v.split(',').map(|s| s.trim().to_string()).collect())
        });
        let delimiter_char: Option<char> = merged!(self.delimiter, "delimiter");
        let delimiter = match delimiter_char {
            None => b',',
            Some(c) if c.is_ascii() => c as u8,
            Some(c) => anyhow::bail!("delimiter must be an ASCII character, got `{c}`"),
        };
        let flag = |cli: bool, key: &str| cli || get(key).map(|v| v == "true").unwrap_or(false);

        Ok(Resolved {
            data: merged!(self.data, "data")
                .ok_or_else(|| anyhow::anyhow!("--data PATH is required"))?,
            delimiter,
            columns,
            formula: merged!(self.formula, "formula"),
            strategy: merged!(self.strategy, "strategy"),
            strategies: strategies.unwrap_or_default(),
            key_column: merged!(self.key_column, "key_column"),
            split_file: merged!(self.split_file, "split_file"),
            fraction: merged!(self.fraction, "fraction").unwrap_or(0.8),
            alpha: merged!(self.alpha, "alpha").unwrap_or(0.05),
            sims: merged!(self.sims, "sims").unwrap_or(1000),
            seed: merged!(self.seed, "seed").unwrap_or(0),
            out: merged!(self.out, "out").unwrap_or_else(|| PathBuf::from(".")),
            plot: flag(self.plot, "plot"),
            workers: merged!(self.workers, "workers"),
            include_observed: flag(self.include_observed, "include_observed"),
            elide_null_sample: flag(self.elide_null_sample, "elide_null_sample"),
        })
    }
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) if w > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T>(workers: Option<usize>, f: impl FnOnce() -> T) -> T {
    if workers.map(|w| w > 1).unwrap_or(false) {
        log::warn!("built without the `parallel` feature; --workers ignored");
    }
    f()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Diagnose(args) => args
            .resolve()
            .and_then(|r| with_workers(r.workers, || commands::diagnose(&r))),
        Command::Split(args) => args.resolve().and_then(|r| commands::split(&r)),
        Command::Compare(args) => args
            .resolve()
            .and_then(|r| with_workers(r.workers, || commands::compare(&r))),
        Command::Sweep(args) => args
            .resolve()
            .and_then(|r| with_workers(r.workers, || commands::sweep(&r))),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
