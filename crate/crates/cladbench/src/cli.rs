//! Command workflows behind the `cladbench` binary: dataset synthesis,
//! model benchmarking, randomized tuning, and process-map generation.
//!
//! Every output file embeds the run seed, a digest of the command
//! configuration, and the schema version; runs with identical configurations
//! produce byte-identical files.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::data::{
    load_dataset, save_dataset_with_comments, summarize_distribution, synthesize_dataset,
    train_test_split, Dataset, Target, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::eval::{evaluate_on_indices, fit_on_indices, Report, SplitDescription, DEFAULT_K};
use crate::features::FeatureSetKind;
use crate::models::{load_model, save_model, EstimatorKind, EstimatorSpec, Task, TrainedModel};
use crate::procmap::{
    predict_geometry_map, predict_quality_map, write_csv, write_svg, GridSpec, MapFormat,
    ProcessMap,
};
use crate::rng::derive_seed;
use crate::tune::{random_search, resolve_kind, search_space_for, SearchResult};

/// FNV-1a over the canonical JSON of a config: the digest embedded in
/// every output file.
pub fn config_digest<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).unwrap_or_default();
    format!("{:016x}", fnv1a(&bytes))
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// `synth` command configuration.
#[derive(Debug, Clone, Serialize)]
pub struct SynthConfig {
    pub surrogate: crate::data::SurrogateConfig,
    pub out: PathBuf,
}

/// Generates a synthetic dataset, writes it as CSV, prints a distribution
/// summary.
pub fn cmd_synth(config: &SynthConfig) -> Result<()> {
    let dataset = synthesize_dataset(&config.surrogate)?;
    let comments = vec![
        "cladbench dataset".to_string(),
        format!("schema_version={SCHEMA_VERSION}"),
        format!("seed={}", config.surrogate.seed),
        format!("config_digest={}", config_digest(config)),
    ];
    save_dataset_with_comments(&dataset, &config.out, &comments)?;

    let summary = summarize_distribution(&dataset)?;
    println!("wrote {} records to {}", summary.n, config.out.display());
    println!(
        "labels: {} desirable (class 0), {} undesirable (class 1)",
        summary.label_counts.0, summary.label_counts.1
    );
    for (name, stats) in [
        ("width", &summary.width),
        ("height", &summary.height),
        ("depth", &summary.depth),
    ] {
        println!(
            "{name:>6} µm: min {:8.1}  max {:8.1}  mean {:8.1}  std {:7.1}",
            stats.min, stats.max, stats.mean, stats.std
        );
    }
    Ok(())
}

/// `benchmark` command configuration.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkConfig {
    pub data: PathBuf,
    /// Model family names, or `all` for every supported kind.
    pub models: Vec<String>,
    pub targets: Vec<Target>,
    pub featureset: FeatureSetKind,
    pub test_fraction: f64,
    pub seed: u64,
    /// Tune each model with randomized search before the final fit.
    pub tune: bool,
    pub n_iter: usize,
    pub k: usize,
    pub out_dir: PathBuf,
}

/// One line of the ranked summary table.
#[derive(Debug, Clone, Serialize)]
struct SummaryRow {
    target: String,
    model: String,
    primary_metric: f64,
    secondary_metric: f64,
}

/// Expands the `--model` list for one task. Families that only exist for the
/// other task are dropped (the benchmark may mix regression and quality
/// targets); names that resolve to nothing at all are usage errors.
fn kinds_for(models: &[String], task: Task) -> Result<Vec<EstimatorKind>> {
    if models.len() == 1 && models[0] == "all" {
        return Ok(EstimatorKind::ALL
            .iter()
            .copied()
            .filter(|k| k.task() == task)
            .collect());
    }
    let supported: Vec<&str> = EstimatorKind::ALL
        .iter()
        .filter(|k| k.task() == task)
        .map(|k| k.name())
        .collect();
    let mut kinds = Vec::new();
    for name in models {
        match resolve_kind(name, task) {
            Ok(kind) => kinds.push(kind),
            Err(Error::Task(_)) => {
                println!("note: `{name}` does not support {task}; skipped for this target");
            }
            Err(Error::UnsupportedKind(n)) => {
                return Err(Error::Config(format!(
                    "unknown model kind `{n}` for {task}; supported: {}",
                    supported.join(", ")
                )));
            }
            Err(other) => return Err(other),
        }
    }
    Ok(kinds)
}

/// Runs the benchmark protocol: per model kind and target, split 80:20 (or
/// the configured fraction), optionally tune on the training split, fit,
/// evaluate held out, and write one report JSON plus a ranked summary table.
pub fn cmd_benchmark(config: &BenchmarkConfig) -> Result<()> {
    let dataset = load_dataset(&config.data)?;
    let digest = config_digest(config);
    std::fs::create_dir_all(&config.out_dir)?;
    let split = train_test_split(dataset.len(), config.test_fraction, config.seed)?;

    let mut rows: Vec<SummaryRow> = Vec::new();
    for &target in &config.targets {
        let task = if target.is_classification() {
            Task::Classification
        } else {
            Task::Regression
        };
        for (slot, kind) in kinds_for(&config.models, task)?.into_iter().enumerate() {
            let model_seed = derive_seed(config.seed, 1000 + slot as u64);
            let spec = if config.tune {
                let space = search_space_for(kind);
                let train_ds = dataset_subset(&dataset, &split.train);
                let result = random_search(
                    &space,
                    &train_ds,
                    config.featureset,
                    target,
                    config.k,
                    config.n_iter,
                    model_seed,
                )?;
                result.best_spec().clone()
            } else {
                EstimatorSpec::new(kind).with_seed(model_seed)
            };

            let model = fit_on_indices(&spec, &dataset, config.featureset, target, &split.train)?;
            let report = evaluate_on_indices(
                &model,
                &dataset,
                target,
                &split.test,
                SplitDescription {
                    seed: config.seed,
                    ratio: Some(config.test_fraction),
                    k: None,
                },
            )?;

            let (primary, secondary) = match &report {
                Report::Regression(r) => (r.metrics.r2, r.metrics.mae),
                Report::Classification(c) => (c.metrics.accuracy, c.metrics.auc),
            };
            rows.push(SummaryRow {
                target: target.name().to_string(),
                model: kind.name().to_string(),
                primary_metric: primary,
                secondary_metric: secondary,
            });

            let path = config
                .out_dir
                .join(format!("report_{}_{}.json", target.name(), kind.name()));
            write_json_with_digest(&report, &digest, config.seed, &path)?;
        }
    }

    let table = summary_table(&rows, &config.targets);
    std::fs::write(config.out_dir.join("summary.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn summary_table(rows: &[SummaryRow], targets: &[Target]) -> String {
    let mut out = String::new();
    for &target in targets {
        let mut subset: Vec<&SummaryRow> = rows
            .iter()
            .filter(|r| r.target == target.name())
            .collect();
        subset.sort_by(|a, b| {
            b.primary_metric
                .total_cmp(&a.primary_metric)
                .then(a.model.cmp(&b.model))
        });
        let (h1, h2) = if target.is_classification() {
            ("accuracy", "auc")
        } else {
            ("r2", "mae_um")
        };
        out.push_str(&format!(
            "target {:<8} {:<10} {:>12} {:>12}\n",
            target.name(),
            "model",
            h1,
            h2
        ));
        for (rank, row) in subset.iter().enumerate() {
            out.push_str(&format!(
                "  #{:<5} {:<12} {:>12.6} {:>12.4}\n",
                rank + 1,
                row.model,
                row.primary_metric,
                row.secondary_metric
            ));
        }
    }
    out
}

fn dataset_subset(dataset: &Dataset, indices: &[usize]) -> Dataset {
    let records = indices
        .iter()
        .map(|&i| dataset.records()[i].clone())
        .collect();
    Dataset::from_records(records).expect("subset of a valid dataset stays valid")
}

fn write_json_with_digest<T: Serialize>(
    value: &T,
    digest: &str,
    seed: u64,
    path: &Path,
) -> Result<()> {
    let mut doc = serde_json::to_value(value)?;
    if let serde_json::Value::Object(map) = &mut doc {
        map.insert("config_digest".into(), digest.into());
        map.insert("seed".into(), seed.into());
    }
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// `tune` command configuration.
#[derive(Debug, Clone, Serialize)]
pub struct TuneConfig {
    pub data: PathBuf,
    pub model: String,
    pub target: Target,
    pub featureset: FeatureSetKind,
    pub test_fraction: f64,
    pub k: usize,
    pub n_iter: usize,
    pub seed: u64,
    /// Output prefix: writes `<prefix>_search.json` and `<prefix>_model.json`.
    pub out_prefix: PathBuf,
}

/// Randomized search on the training split only, then a winner refit on the
/// full training split and a saved model artifact.
pub fn cmd_tune(config: &TuneConfig) -> Result<(SearchResult, TrainedModel)> {
    let dataset = load_dataset(&config.data)?;
    let digest = config_digest(config);
    let task = if config.target.is_classification() {
        Task::Classification
    } else {
        Task::Regression
    };
    let kind = resolve_kind(&config.model, task)?;
    let split = train_test_split(dataset.len(), config.test_fraction, config.seed)?;
    let train_ds = dataset_subset(&dataset, &split.train);

    let space = search_space_for(kind);
    let result = random_search(
        &space,
        &train_ds,
        config.featureset,
        config.target,
        config.k,
        config.n_iter,
        config.seed,
    )?;

    let model = fit_on_indices(
        result.best_spec(),
        &dataset,
        config.featureset,
        config.target,
        &split.train,
    )?;

    let search_path = suffixed(&config.out_prefix, "_search.json");
    write_json_with_digest(&result, &digest, config.seed, &search_path)?;
    let model_path = suffixed(&config.out_prefix, "_model.json");
    save_model(&model, &model_path)?;

    println!(
        "tuned {} on {}: best trial #{} (mean score {:.6}), {} trials",
        kind.name(),
        config.target.name(),
        result.best,
        result.best_score(),
        result.trials.len()
    );
    println!(
        "wrote {} and {}",
        search_path.display(),
        model_path.display()
    );
    Ok((result, model))
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    name.push_str(suffix);
    prefix.with_file_name(name)
}

/// `procmap` command configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ProcmapConfig {
    pub model_path: PathBuf,
    pub grid: GridSpec,
    /// Requested map kind; defaults to the artifact's own target.
    pub kind: Option<Target>,
    pub formats: Vec<String>,
    pub out_prefix: PathBuf,
}

/// Evaluates a saved model over the grid and exports the map(s).
pub fn cmd_procmap(config: &ProcmapConfig) -> Result<()> {
    let model = load_model(&config.model_path)?;
    let digest = config_digest(config);
    let artifact_hash = format!("{:016x}", fnv1a(&std::fs::read(&config.model_path)?));
    let formats: Vec<MapFormat> = config
        .formats
        .iter()
        .map(|f| f.parse().map_err(Error::Config))
        .collect::<Result<_>>()?;

    let maps: Vec<ProcessMap> = match (config.kind, model.task) {
        (Some(Target::Quality), Task::Classification) | (None, Task::Classification) => {
            let (class_map, prob_map) = predict_quality_map(&model, &config.grid)?;
            vec![class_map, prob_map]
        }
        (Some(Target::Quality), Task::Regression) => {
            return Err(Error::Task(
                "quality maps need a classifier artifact; this one is a regressor".into(),
            ));
        }
        (Some(geometry), Task::Classification) => {
            return Err(Error::Task(format!(
                "{} maps need a regression artifact; this one is a classifier",
                geometry.name()
            )));
        }
        (requested, Task::Regression) => {
            let map = predict_geometry_map(&model, &config.grid)?;
            if let Some(want) = requested {
                if map.kind.name() != want.name() {
                    return Err(Error::Task(format!(
                        "artifact predicts `{}` but `{}` was requested",
                        map.kind.name(),
                        want.name()
                    )));
                }
            }
            vec![map]
        }
    };

    for mut map in maps {
        map.model_ref = format!("{}:{artifact_hash}", map.model_ref);
        let comments = vec![
            format!("seed={}", model.spec.seed),
            format!("config_digest={digest}"),
        ];
        for &format in &formats {
            let path = suffixed(
                &config.out_prefix,
                &format!("_{}.{}", map.kind.name(), ext(format)),
            );
            match format {
                MapFormat::Csv => write_csv(&map, &path, &comments)?,
                MapFormat::Svg => write_svg(&map, &path, &[])?,
                MapFormat::Json => {
                    write_json_with_digest(&map, &digest, model.spec.seed, &path)?
                }
            }
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn ext(format: MapFormat) -> &'static str {
    match format {
        MapFormat::Csv => "csv",
        MapFormat::Json => "json",
        MapFormat::Svg => "svg",
    }
}

/// Shared defaults for the binary.
pub mod defaults {
    pub const TEST_FRACTION: f64 = 0.2;
    pub const N_ITER: usize = crate::tune::DEFAULT_N_ITER;
    pub const K: usize = super::DEFAULT_K;
    pub const GRID: &str = "100:500:50,2:20:50";
    pub const FEED_RATE: f64 = 2.0;
    pub const BEAM_RADIUS: f64 = 0.5;
}

/// Parses the `--grid p0:p1:np,v0:v1:nv` flag.
pub fn parse_grid(text: &str, feed_rate: f64, beam_radius: f64) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Config(format!(
            "grid must be `p0:p1:np,v0:v1:nv`, got `{text}`"
        )));
    }
    let axis = |s: &str| -> Result<(f64, f64, usize)> {
        let f: Vec<&str> = s.split(':').collect();
        if f.len() != 3 {
            return Err(Error::Config(format!("axis must be `lo:hi:steps`, got `{s}`")));
        }
        let lo = f[0]
            .parse()
            .map_err(|e| Error::Config(format!("bad axis value `{}`: {e}", f[0])))?;
        let hi = f[1]
            .parse()
            .map_err(|e| Error::Config(format!("bad axis value `{}`: {e}", f[1])))?;
        let steps = f[2]
            .parse()
            .map_err(|e| Error::Config(format!("bad step count `{}`: {e}", f[2])))?;
        Ok((lo, hi, steps))
    };
    let grid = GridSpec {
        power_axis: axis(parts[0])?,
        velocity_axis: axis(parts[1])?,
        feed_rate,
        beam_radius,
    };
    grid.validate()?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_config_sensitive() {
        let a = SynthConfig {
            surrogate: crate::data::SurrogateConfig::default(),
            out: "x.csv".into(),
        };
        let mut b = a.clone();
        assert_eq!(config_digest(&a), config_digest(&b));
        b.surrogate.seed = 99;
        assert_ne!(config_digest(&a), config_digest(&b));
    }

    #[test]
    fn grid_flag_parses() {
        let g = parse_grid("100:500:10,2:20:5", 0.2, 0.5).unwrap();
        assert_eq!(g.power_axis, (100.0, 500.0, 10));
        assert_eq!(g.velocity_axis, (2.0, 20.0, 5));
        assert!(parse_grid("100:500:10", 0.2, 0.5).is_err());
        assert!(parse_grid("500:100:10,2:20:5", 0.2, 0.5).is_err());
    }

    #[test]
    fn unknown_model_is_usage_error_listing_kinds() {
        let err = kinds_for(&["nope".to_string()], Task::Regression).unwrap_err();
        match err {
            Error::Config(msg) => {
                assert!(msg.contains("supported:"));
                assert!(msg.contains("gbr"));
            }
            other => panic!("expected usage error, got {other:?}"),
        }
        assert_eq!(err_exit(), 2);
    }

    fn err_exit() -> i32 {
        kinds_for(&["nope".to_string()], Task::Regression)
            .unwrap_err()
            .exit_code()
    }

    #[test]
    fn all_expands_to_task_roster() {
        let reg = kinds_for(&["all".to_string()], Task::Regression).unwrap();
        assert!(reg.contains(&EstimatorKind::Gbr));
        assert!(reg.contains(&EstimatorKind::Lasso));
        assert!(!reg.contains(&EstimatorKind::Gnb));
        let clf = kinds_for(&["all".to_string()], Task::Classification).unwrap();
        assert!(clf.contains(&EstimatorKind::MlpClf));
        assert!(!clf.contains(&EstimatorKind::Gpr));
    }
}
