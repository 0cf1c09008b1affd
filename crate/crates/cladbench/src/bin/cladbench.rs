//! Command-line front end: `synth`, `benchmark`, `tune`, `procmap`.
//!
//! Exit codes: 0 success, 2 usage, 3 data/task error, 4 internal.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use cladbench::cli::{
    cmd_benchmark, cmd_procmap, cmd_synth, cmd_tune, defaults, parse_grid, BenchmarkConfig,
    ProcmapConfig, SynthConfig, TuneConfig,
};
use cladbench::data::{SurrogateConfig, Target};
use cladbench::error::{Error, Result};
use cladbench::features::FeatureSetKind;

#[derive(Parser)]
#[command(
    name = "cladbench",
    version,
    about = "Clad geometry and quality prediction benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic clad dataset CSV
    Synth(SynthArgs),
    /// Train and evaluate models on a dataset, writing report JSONs
    Benchmark(BenchmarkArgs),
    /// Randomized hyperparameter search plus a refit model artifact
    Tune(TuneArgs),
    /// Evaluate a model artifact over a (power, velocity) grid
    Procmap(ProcmapArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of experiment-tagged records
    #[arg(long = "n-exp", default_value_t = 90)]
    n_experiment: usize,
    /// Number of CFD-tagged records (these get half the noise)
    #[arg(long = "n-cfd", default_value_t = 235)]
    n_cfd: usize,
    /// Relative noise level per geometry channel
    #[arg(long, default_value_t = 0.05)]
    noise_sd: f64,
    /// Laser power range, W, as `lo:hi`
    #[arg(long, default_value = "100:500")]
    power_range: String,
    /// Scan velocity range, mm/s, as `lo:hi`
    #[arg(long, default_value = "2:20")]
    velocity_range: String,
    /// Powder feed-rate range, g/s, as `lo:hi`
    #[arg(long, default_value = "0.5:5")]
    feed_range: String,
    /// Beam radius, mm
    #[arg(long, default_value_t = defaults::BEAM_RADIUS)]
    radius: f64,
    #[arg(long, env = "CLADBENCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Output CSV path
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Dataset CSV
    #[arg(long)]
    data: PathBuf,
    /// Model kinds (comma separated), or `all`
    #[arg(long = "model", value_delimiter = ',', default_value = "all")]
    models: Vec<String>,
    /// Targets (comma separated): width, height, depth, quality
    #[arg(long = "target", value_delimiter = ',', default_value = "width,height,depth,quality")]
    targets: Vec<String>,
    /// Feature set: machine or full
    #[arg(long, default_value = "full")]
    features: String,
    #[arg(long, default_value_t = defaults::TEST_FRACTION)]
    test_fraction: f64,
    /// Run randomized search per model before the final fit
    #[arg(long, default_value_t = false)]
    tune: bool,
    /// Search budget when --tune is set
    #[arg(long, default_value_t = defaults::N_ITER)]
    n_iter: usize,
    /// Cross-validation folds when --tune is set
    #[arg(long, default_value_t = defaults::K)]
    k: usize,
    #[arg(long, env = "CLADBENCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Output directory for report JSONs and summary.txt
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    data: PathBuf,
    /// Model kind to tune
    #[arg(long)]
    model: String,
    /// Target: width, height, depth, or quality
    #[arg(long)]
    target: String,
    #[arg(long, default_value = "full")]
    features: String,
    #[arg(long, default_value_t = defaults::TEST_FRACTION)]
    test_fraction: f64,
    #[arg(long, default_value_t = defaults::K)]
    k: usize,
    #[arg(long, default_value_t = defaults::N_ITER)]
    n_iter: usize,
    #[arg(long, env = "CLADBENCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Output prefix: writes <prefix>_search.json and <prefix>_model.json
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProcmapArgs {
    /// Model artifact JSON written by `tune`
    #[arg(long)]
    model: PathBuf,
    /// Grid as `p0:p1:np,v0:v1:nv`
    #[arg(long, default_value = defaults::GRID)]
    grid: String,
    /// Fixed powder feed rate, g/s
    #[arg(long, default_value_t = defaults::FEED_RATE)]
    feed: f64,
    /// Fixed beam radius, mm
    #[arg(long, default_value_t = defaults::BEAM_RADIUS)]
    radius: f64,
    /// Map kind override: width, height, depth, or quality
    #[arg(long)]
    kind: Option<String>,
    /// Export formats (comma separated): csv, json, svg
    #[arg(long = "format", value_delimiter = ',', default_value = "csv,json")]
    formats: Vec<String>,
    /// Output prefix for map files
    #[arg(short, long)]
    out: PathBuf,
}

fn parse_range(text: &str, flag: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!("{flag} must be `lo:hi`, got `{text}`")));
    }
    let lo = parts[0]
        .parse()
        .map_err(|e| Error::Config(format!("{flag}: {e}")))?;
    let hi = parts[1]
        .parse()
        .map_err(|e| Error::Config(format!("{flag}: {e}")))?;
    Ok((lo, hi))
}

fn parse_target(text: &str) -> Result<Target> {
    text.parse().map_err(Error::Config)
}

fn parse_features(text: &str) -> Result<FeatureSetKind> {
    text.parse().map_err(Error::Config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => cmd_synth(&SynthConfig {
            surrogate: SurrogateConfig {
                power_range: parse_range(&args.power_range, "--power-range")?,
                velocity_range: parse_range(&args.velocity_range, "--velocity-range")?,
                feed_range: parse_range(&args.feed_range, "--feed-range")?,
                beam_radius: args.radius,
                n_experiment: args.n_experiment,
                n_cfd: args.n_cfd,
                noise_sd: args.noise_sd,
                seed: args.seed,
            },
            out: args.out,
        }),
        Command::Benchmark(args) => cmd_benchmark(&BenchmarkConfig {
            data: args.data,
            models: args.models,
            targets: args
                .targets
                .iter()
                .map(|t| parse_target(t))
                .collect::<Result<_>>()?,
            featureset: parse_features(&args.features)?,
            test_fraction: args.test_fraction,
            seed: args.seed,
            tune: args.tune,
            n_iter: args.n_iter,
            k: args.k,
            out_dir: args.out,
        }),
        Command::Tune(args) => cmd_tune(&TuneConfig {
            data: args.data,
            model: args.model,
            target: parse_target(&args.target)?,
            featureset: parse_features(&args.features)?,
            test_fraction: args.test_fraction,
            k: args.k,
            n_iter: args.n_iter,
            seed: args.seed,
            out_prefix: args.out,
        })
        .map(|_| ()),
        Command::Procmap(args) => cmd_procmap(&ProcmapConfig {
            model_path: args.model,
            grid: parse_grid(&args.grid, args.feed, args.radius)?,
            kind: args.kind.as_deref().map(parse_target).transpose()?,
            formats: args.formats,
            out_prefix: args.out,
        }),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
