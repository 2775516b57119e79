//! Command-line front end: generate data, run selectors, run benchmarks,
//! run pair sweeps.
//!
//! Exit codes (mapped in `main`): 0 success, 1 runtime failure, 2
//! configuration or input error. Every command funnels all randomness
//! through its `--seed` flag. Flags override values from an optional JSON
//! config file (`--config`); built-in defaults apply last and are stated in
//! each flag's help text.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::baselines::{InnerModel, SelectorSpec};
use crate::dataset::{
    generate_synthetic, load_csv, standardize, write_csv, Dataset, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::evaluation::{pair_sweep, run_benchmark, BenchmarkReport};
use crate::fsdr::FsdrConfig;

#[derive(Debug, Parser)]
#[command(
    name = "fsdr",
    about = "Gradient-based feature selection for pseudo time-series data, with baselines and a benchmark harness",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic planted-band dataset (CSV + ground-truth JSON sidecar).
    Gen(GenArgs),
    /// Run one selector on a dataset and emit its selection as JSON.
    Select(SelectArgs),
    /// Run the full benchmark grid and emit CSV + JSON reports.
    Bench(BenchArgs),
    /// Evaluate all two-band combinations and emit the R² grid as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of samples (default: 1000)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of features/bands (default: 512)
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated 1-based planted band positions (default: 5 bands spread over the axis)
    #[arg(long, value_delimiter = ',')]
    pub planted: Option<Vec<usize>>,
    /// Gaussian smoothing width in index units (default: 8)
    #[arg(long)]
    pub smoothness: Option<f64>,
    /// Response noise standard deviation (default: 0.05)
    #[arg(long = "noise-std")]
    pub noise_std: Option<f64>,
    /// Generator seed (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path; the ground truth goes to the same path with a .truth.json extension
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Selector: fsdr, mi, sfs, or lasso (default: fsdr)
    #[arg(long)]
    pub method: Option<String>,
    /// Target number of features (default: 5)
    #[arg(long)]
    pub t: Option<usize>,
    /// Input CSV path
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Response column name (default: response)
    #[arg(long)]
    pub response: Option<String>,
    /// Seed for the selector (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the selection JSON here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// fsdr: training epochs (default: 200)
    #[arg(long)]
    pub epochs: Option<usize>,
    /// fsdr: minibatch size (default: 64)
    #[arg(long = "batch-size")]
    pub batch_size: Option<usize>,
    /// fsdr: network learning rate (default: 1e-3)
    #[arg(long = "network-lr")]
    pub network_lr: Option<f64>,
    /// fsdr: index learning rate (default: 1e-3)
    #[arg(long = "index-lr")]
    pub index_lr: Option<f64>,
    /// mi: number of equal-frequency bins (default: 16)
    #[arg(long)]
    pub bins: Option<usize>,
    /// sfs: inner model, ridge or mlp (default: ridge)
    #[arg(long)]
    pub inner: Option<String>,
    /// lasso: number of path values (default: 50)
    #[arg(long = "path-len")]
    pub path_len: Option<usize>,
    /// lasso: smallest-to-largest lambda ratio (default: 1e-3)
    #[arg(long = "path-ratio")]
    pub path_ratio: Option<f64>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated input CSV paths
    #[arg(long, value_delimiter = ',')]
    pub data: Option<Vec<PathBuf>>,
    /// Comma-separated selectors (default: fsdr,mi,sfs,lasso)
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Comma-separated target sizes (default: 2,5,10,15,20)
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Comma-separated seeds (default: 1)
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Response column name (default: response)
    #[arg(long)]
    pub response: Option<String>,
    /// Report path prefix; writes <out>.csv and <out>.json (default: benchmark_report)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Input CSV path
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Response column name (default: response)
    #[arg(long)]
    pub response: Option<String>,
    /// Seed for split and per-pair models (default: 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the grid CSV here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("invalid config {}: {e}", p.display())))
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenFile {
    n: Option<usize>,
    d: Option<usize>,
    planted: Option<Vec<usize>>,
    smoothness: Option<f64>,
    noise_std: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

/// Default planted bands: five positions spread over the axis at fixed
/// fractions, away from both the endpoints and the exact init positions.
pub fn default_planted(d: usize) -> Vec<usize> {
    [0.145, 0.355, 0.52, 0.645, 0.855]
        .iter()
        .map(|f| ((d as f64 * f).round() as usize).clamp(1, d))
        .collect()
}

pub fn cmd_gen(args: &GenArgs) -> Result<()> {
    let file: GenFile = load_config(args.config.as_deref())?;
    let n = args.n.or(file.n).unwrap_or(1000);
    let d = args.d.or(file.d).unwrap_or(512);
    let planted = args
        .planted
        .clone()
        .or(file.planted)
        .unwrap_or_else(|| default_planted(d));
    let spec = SyntheticSpec {
        n_samples: n,
        n_features: d,
        planted_bands: planted,
        smoothness: args.smoothness.or(file.smoothness).unwrap_or(8.0),
        noise_std: args.noise_std.or(file.noise_std).unwrap_or(0.05),
        seed: args.seed.or(file.seed).unwrap_or(0),
    };
    let out = args
        .out
        .clone()
        .or(file.out)
        .ok_or_else(|| Error::Config("--out is required for gen".into()))?;
    let (dataset, truth) = generate_synthetic(&spec)?;
    write_csv(&dataset, &out, "response")?;
    let sidecar = out.with_extension("truth.json");
    std::fs::write(&sidecar, serde_json::to_string_pretty(&truth)?)?;
    eprintln!(
        "wrote {} ({}x{}) and {}",
        out.display(),
        n,
        d,
        sidecar.display()
    );
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelectFile {
    method: Option<String>,
    t: Option<usize>,
    data: Option<PathBuf>,
    response: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    network_lr: Option<f64>,
    index_lr: Option<f64>,
    bins: Option<usize>,
    inner: Option<String>,
    path_len: Option<usize>,
    path_ratio: Option<f64>,
}

fn parse_inner(name: &str) -> Result<InnerModel> {
    match name {
        "ridge" => Ok(InnerModel::Ridge),
        "mlp" => Ok(InnerModel::Mlp),
        other => Err(Error::Config(format!(
            "unknown inner model \"{other}\" (expected ridge or mlp)"
        ))),
    }
}

fn load_dataset(path: Option<&Path>, response: &str) -> Result<Dataset> {
    let path = path.ok_or_else(|| Error::Config("--data is required".into()))?;
    load_csv(path, response)
}

pub fn cmd_select(args: &SelectArgs) -> Result<()> {
    let file: SelectFile = load_config(args.config.as_deref())?;
    let method = args
        .method
        .clone()
        .or(file.method)
        .unwrap_or_else(|| "fsdr".into());
    let t = args.t.or(file.t).unwrap_or(5);
    if t < 1 {
        return Err(Error::Config("target size must be >= 1".into()));
    }
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let response = args
        .response
        .clone()
        .or(file.response)
        .unwrap_or_else(|| "response".into());

    let defaults = FsdrConfig::default();
    let spec = match method.as_str() {
        "fsdr" => SelectorSpec::Fsdr {
            epochs: args.epochs.or(file.epochs).unwrap_or(defaults.epochs),
            batch_size: args
                .batch_size
                .or(file.batch_size)
                .unwrap_or(defaults.batch_size),
            network_lr: args
                .network_lr
                .or(file.network_lr)
                .unwrap_or(defaults.network_lr),
            index_lr: args.index_lr.or(file.index_lr).unwrap_or(defaults.index_lr),
        },
        "mi" => SelectorSpec::Mi {
            bins: args.bins.or(file.bins).unwrap_or(16),
        },
        "sfs" => SelectorSpec::Sfs {
            inner: parse_inner(
                &args
                    .inner
                    .clone()
                    .or(file.inner)
                    .unwrap_or_else(|| "ridge".into()),
            )?,
        },
        "lasso" => SelectorSpec::Lasso {
            path_len: args.path_len.or(file.path_len).unwrap_or(50),
            path_ratio: args.path_ratio.or(file.path_ratio).unwrap_or(1e-3),
        },
        other => {
            return Err(Error::Config(format!(
                "unknown method \"{other}\" (expected fsdr, mi, sfs, or lasso)"
            )))
        }
    };

    let dataset = load_dataset(args.data.as_deref().or(file.data.as_deref()), &response)?;
    let (dataset_std, _) = standardize(&dataset)?;
    let result = spec.select(&dataset_std, t, seed)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let json = serde_json::to_string_pretty(&result)?;
    match args.out.clone().or(file.out) {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchFile {
    data: Option<Vec<PathBuf>>,
    methods: Option<Vec<String>>,
    sizes: Option<Vec<usize>>,
    seeds: Option<Vec<u64>>,
    response: Option<String>,
    out: Option<PathBuf>,
}

fn print_summary(report: &BenchmarkReport) {
    println!(
        "{:<16} {:<6} {:>3} {:>3} {:>10} {:>8} {:>8}",
        "dataset", "method", "t", "t'", "time_s", "r2", "rmse"
    );
    for row in &report.rows {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<16} {:<6} {:>3} {:>3} {:>10.3} {:>8} {:>8}{}",
            row.dataset,
            row.selector,
            row.t,
            row.t_prime,
            row.time_s,
            fmt(row.r2),
            fmt(row.rmse),
            row.error
                .as_deref()
                .map(|e| format!("  [error: {e}]"))
                .unwrap_or_default()
        );
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let file: BenchFile = load_config(args.config.as_deref())?;
    let data = args
        .data
        .clone()
        .or(file.data)
        .ok_or_else(|| Error::Config("--data is required".into()))?;
    let methods = args
        .methods
        .clone()
        .or(file.methods)
        .unwrap_or_else(|| vec!["fsdr".into(), "mi".into(), "sfs".into(), "lasso".into()]);
    let sizes = args
        .sizes
        .clone()
        .or(file.sizes)
        .unwrap_or_else(|| vec![2, 5, 10, 15, 20]);
    let seeds = args.seeds.clone().or(file.seeds).unwrap_or_else(|| vec![1]);
    let response = args
        .response
        .clone()
        .or(file.response)
        .unwrap_or_else(|| "response".into());
    let out = args
        .out
        .clone()
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("benchmark_report"));

    let selectors: Vec<SelectorSpec> = methods
        .iter()
        .map(|m| SelectorSpec::from_name(m))
        .collect::<Result<_>>()?;
    let datasets: Vec<Dataset> = data
        .iter()
        .map(|p| load_csv(p, &response))
        .collect::<Result<_>>()?;

    let report = run_benchmark(&datasets, &selectors, &sizes, &seeds)?;
    let csv_path = out.with_extension("csv");
    let json_path = out.with_extension("json");
    report.write_csv(&csv_path)?;
    report.write_json(&json_path)?;
    print_summary(&report);
    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    if report.rows.iter().all(|r| r.error.is_some()) {
        return Err(Error::Numeric("every benchmark combination failed".into()));
    }
    Ok(())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    data: Option<PathBuf>,
    response: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let file: SweepFile = load_config(args.config.as_deref())?;
    let response = args
        .response
        .clone()
        .or(file.response)
        .unwrap_or_else(|| "response".into());
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let dataset = load_dataset(args.data.as_deref().or(file.data.as_deref()), &response)?;
    let grid = pair_sweep(&dataset, seed)?;
    eprintln!(
        "evaluated {} pairs, mean adjacent |dR2| = {:.4}",
        grid.evaluated_pairs(),
        grid.mean_adjacent_delta
    );
    match args.out.clone().or(file.out) {
        Some(path) => grid.write_csv(path)?,
        None => print!("{}", grid.to_csv_string()),
    }
    Ok(())
}

/// Dispatch a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Select(args) => cmd_select(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}
