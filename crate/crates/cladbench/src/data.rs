//! Dataset model: clad observations, dilution-based quality labeling, the
//! synthetic surrogate generator, CSV serialization, and data splitting.
//!
//! A [`CladRecord`] holds the process inputs (laser power, scan velocity,
//! powder feed rate, beam radius) and the measured single-track geometry
//! (width, height, depth, all in µm). Clad quality is derived from dilution,
//! `depth / (depth + height)`: a track is desirable when dilution falls in
//! `[0.20, 0.50]` (inclusive at both ends) and undesirable otherwise.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{linear_mass_density, volumetric_energy_density};
use crate::rng::seeded;

/// Version stamp written into every serialized data product.
pub const SCHEMA_VERSION: u32 = 1;

/// Provenance of one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    Experiment,
    Cfd,
    Synthetic,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Source::Experiment => "EXPERIMENT",
            Source::Cfd => "CFD",
            Source::Synthetic => "SYNTHETIC",
        };
        f.write_str(s)
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "EXPERIMENT" => Ok(Source::Experiment),
            "CFD" => Ok(Source::Cfd),
            "SYNTHETIC" => Ok(Source::Synthetic),
            other => Err(format!("unknown source `{other}`")),
        }
    }
}

/// One observed single-track clad: process inputs plus measured geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CladRecord {
    pub id: u64,
    pub source: Source,
    /// Laser power, W.
    pub power: f64,
    /// Laser scan velocity, mm/s.
    pub velocity: f64,
    /// Powder mass flow rate, g/s.
    pub feed_rate: f64,
    /// Laser beam radius, mm.
    pub beam_radius: f64,
    /// Clad width, µm.
    pub width: f64,
    /// Clad height above the substrate, µm.
    pub height: f64,
    /// Melt-pool depth below the substrate, µm.
    pub depth: f64,
}

impl CladRecord {
    /// Builds a record, rejecting values that violate the field invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: u64,
        source: Source,
        power: f64,
        velocity: f64,
        feed_rate: f64,
        beam_radius: f64,
        width: f64,
        height: f64,
        depth: f64,
    ) -> Result<Self> {
        fn check(field: &'static str, value: f64, strict: bool) -> Result<()> {
            let ok = value.is_finite() && if strict { value > 0.0 } else { value >= 0.0 };
            if ok {
                Ok(())
            } else {
                Err(Error::Validation {
                    field,
                    message: format!(
                        "must be {} and finite, got {value}",
                        if strict { "> 0" } else { ">= 0" }
                    ),
                })
            }
        }
        check("power", power, true)?;
        check("velocity", velocity, true)?;
        check("beam_radius", beam_radius, true)?;
        check("feed_rate", feed_rate, false)?;
        check("width", width, false)?;
        check("height", height, false)?;
        check("depth", depth, false)?;
        if height == 0.0 && depth == 0.0 {
            return Err(Error::DegenerateRecord);
        }
        Ok(CladRecord {
            id,
            source,
            power,
            velocity,
            feed_rate,
            beam_radius,
            width,
            height,
            depth,
        })
    }
}

/// Two-class clad quality. Class 0 is the desirable window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QualityClass {
    Desirable,
    Undesirable,
}

impl QualityClass {
    pub fn as_u8(self) -> u8 {
        match self {
            QualityClass::Desirable => 0,
            QualityClass::Undesirable => 1,
        }
    }

    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(QualityClass::Desirable),
            1 => Ok(QualityClass::Undesirable),
            other => Err(Error::Validation {
                field: "label",
                message: format!("label must be 0 or 1, got {other}"),
            }),
        }
    }
}

/// Quality label together with the dilution it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityLabel {
    pub value: QualityClass,
    pub dilution: f64,
}

/// Dilution ratio `depth / (depth + height)`.
///
/// Rejects the degenerate case `depth + height = 0`, where the ratio is
/// undefined; such records must not enter a dataset.
pub fn compute_dilution(depth: f64, height: f64) -> Result<f64> {
    if depth < 0.0 || height < 0.0 {
        return Err(Error::Domain(format!(
            "depth and height must be >= 0, got ({depth}, {height})"
        )));
    }
    if depth + height == 0.0 {
        return Err(Error::DegenerateRecord);
    }
    Ok(depth / (depth + height))
}

/// Labels a record desirable iff its dilution lies in `[0.20, 0.50]`,
/// inclusive at both ends.
pub fn label_quality(record: &CladRecord) -> Result<QualityLabel> {
    let dilution = compute_dilution(record.depth, record.height)?;
    let value = if (0.20..=0.50).contains(&dilution) {
        QualityClass::Desirable
    } else {
        QualityClass::Undesirable
    };
    Ok(QualityLabel { value, dilution })
}

/// An ordered collection of records with parallel quality labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    records: Vec<CladRecord>,
    labels: Vec<QualityLabel>,
    pub schema_version: u32,
}

impl Dataset {
    /// Builds a dataset from records, deriving the label of each one.
    /// Ids must be unique.
    pub fn from_records(records: Vec<CladRecord>) -> Result<Self> {
        let mut ids: Vec<u64> = records.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation {
                field: "id",
                message: "record ids must be unique".into(),
            });
        }
        let labels = records
            .iter()
            .map(label_quality)
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            records,
            labels,
            schema_version: SCHEMA_VERSION,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[CladRecord] {
        &self.records
    }

    pub fn labels(&self) -> &[QualityLabel] {
        &self.labels
    }

    /// Target values for one modeling task, in record order.
    pub fn target_vector(&self, target: Target) -> Vec<f64> {
        match target {
            Target::Width => self.records.iter().map(|r| r.width).collect(),
            Target::Height => self.records.iter().map(|r| r.height).collect(),
            Target::Depth => self.records.iter().map(|r| r.depth).collect(),
            Target::Quality => self
                .labels
                .iter()
                .map(|l| f64::from(l.value.as_u8()))
                .collect(),
        }
    }
}

/// Prediction target selector used by evaluation and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Width,
    Height,
    Depth,
    Quality,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Width => "width",
            Target::Height => "height",
            Target::Depth => "depth",
            Target::Quality => "quality",
        }
    }

    pub fn is_classification(self) -> bool {
        matches!(self, Target::Quality)
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "width" => Ok(Target::Width),
            "height" => Ok(Target::Height),
            "depth" => Ok(Target::Depth),
            "quality" => Ok(Target::Quality),
            other => Err(format!("unknown target `{other}`")),
        }
    }
}

/// Configuration of the synthetic surrogate generator.
///
/// The generator stands in for the experiment/CFD data source: it samples
/// process inputs uniformly from the configured ranges and maps them through
/// fixed response surfaces with multiplicative Gaussian noise. CFD-tagged
/// records get half the configured noise (smoother, model-generated data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateConfig {
    /// Laser power range, W.
    pub power_range: (f64, f64),
    /// Scan velocity range, mm/s.
    pub velocity_range: (f64, f64),
    /// Powder feed-rate range, g/s.
    pub feed_range: (f64, f64),
    /// Beam radius, mm (fixed per dataset).
    pub beam_radius: f64,
    pub n_experiment: usize,
    pub n_cfd: usize,
    /// Relative noise level applied per geometry channel.
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        // The feed range is set so that dilution spans both quality classes
        // under the fixed response surfaces.
        SurrogateConfig {
            power_range: (100.0, 500.0),
            velocity_range: (2.0, 20.0),
            feed_range: (0.5, 5.0),
            beam_radius: 0.5,
            n_experiment: 90,
            n_cfd: 235,
            noise_sd: 0.05,
            seed: 0,
        }
    }
}

impl SurrogateConfig {
    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("power_range", self.power_range),
            ("velocity_range", self.velocity_range),
            ("feed_range", self.feed_range),
        ];
        for (name, (lo, hi)) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
                return Err(Error::Config(format!(
                    "{name} must satisfy 0 < min < max, got ({lo}, {hi})"
                )));
            }
        }
        if !(self.beam_radius.is_finite() && self.beam_radius > 0.0) {
            return Err(Error::Config(format!(
                "beam_radius must be > 0, got {}",
                self.beam_radius
            )));
        }
        if self.n_experiment + self.n_cfd == 0 {
            return Err(Error::Config(
                "n_experiment + n_cfd must be > 0".into(),
            ));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(Error::Config(format!(
                "noise_sd must be >= 0, got {}",
                self.noise_sd
            )));
        }
        Ok(())
    }
}

/// Noise-free surrogate response surfaces.
///
/// With `e` the volumetric energy density (J/mm³), `lambda` the linear mass
/// density (g/mm) and `lambda_max` the largest mass density reachable in the
/// configured ranges:
///   width  = 180 · e^0.45 · (1 + 0.1 · lambda / lambda_max)
///   height = 900 · lambda^0.8
///   depth  = 14 · e^0.9
pub fn surrogate_geometry(e: f64, lambda: f64, lambda_max: f64) -> (f64, f64, f64) {
    let width = 180.0 * e.powf(0.45) * (1.0 + 0.1 * lambda / lambda_max);
    let height = 900.0 * lambda.powf(0.8);
    let depth = 14.0 * e.powf(0.9);
    (width, height, depth)
}

/// Generates a synthetic dataset. Pure function of the config: identical
/// configs produce identical datasets.
pub fn synthesize_dataset(config: &SurrogateConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = seeded(config.seed);
    let lambda_max = config.feed_range.1 / config.velocity_range.0;
    let n = config.n_experiment + config.n_cfd;
    let mut records = Vec::with_capacity(n);
    for id in 0..n {
        let source = if id < config.n_experiment {
            Source::Experiment
        } else {
            Source::Cfd
        };
        let power = rng.random_range(config.power_range.0..=config.power_range.1);
        let velocity = rng.random_range(config.velocity_range.0..=config.velocity_range.1);
        let feed_rate = rng.random_range(config.feed_range.0..=config.feed_range.1);
        let e = volumetric_energy_density(power, velocity, config.beam_radius)?;
        let lambda = linear_mass_density(feed_rate, velocity)?;
        let (width0, height0, depth0) = surrogate_geometry(e, lambda, lambda_max);

        let sd = match source {
            Source::Cfd => config.noise_sd / 2.0,
            _ => config.noise_sd,
        };
        let normal = Normal::new(0.0, sd)
            .map_err(|e| Error::Config(format!("invalid noise_sd: {e}")))?;
        // Redraw if noise drives both height and depth to zero; the record
        // would be degenerate (dilution undefined).
        let mut geometry = None;
        for _ in 0..1000 {
            let w = (width0 * (1.0 + normal.sample(&mut rng))).max(0.0);
            let h = (height0 * (1.0 + normal.sample(&mut rng))).max(0.0);
            let d = (depth0 * (1.0 + normal.sample(&mut rng))).max(0.0);
            if h > 0.0 || d > 0.0 {
                geometry = Some((w, h, d));
                break;
            }
        }
        let (width, height, depth) = geometry.ok_or_else(|| {
            Error::Config("noise level degenerates every sample; lower noise_sd".into())
        })?;
        records.push(CladRecord::new(
            id as u64,
            source,
            power,
            velocity,
            feed_rate,
            config.beam_radius,
            width,
            height,
            depth,
        )?);
    }
    Dataset::from_records(records)
}

const CSV_HEADER: [&str; 11] = [
    "id",
    "source",
    "power_w",
    "velocity_mm_s",
    "feed_rate_g_s",
    "beam_radius_mm",
    "width_um",
    "height_um",
    "depth_um",
    "dilution",
    "label",
];

/// Formats a float with 9 significant digits, the dataset CSV precision.
pub(crate) fn fmt_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Writes the dataset in the canonical CSV schema. `comments` lines, if any,
/// are emitted first as `#`-prefixed metadata.
pub fn save_dataset_with_comments(
    dataset: &Dataset,
    path: &Path,
    comments: &[String],
) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&CSV_HEADER.join(","));
    out.push('\n');
    for (record, label) in dataset.records.iter().zip(&dataset.labels) {
        // The stored dilution is derived from the geometry exactly as it
        // appears in the file (9 significant digits), keeping the file
        // self-consistent: one save/load cycle is the identity.
        let depth_stored: f64 = fmt_sig9(record.depth).parse().unwrap();
        let height_stored: f64 = fmt_sig9(record.height).parse().unwrap();
        let dilution_stored = depth_stored / (depth_stored + height_stored);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            record.id,
            record.source,
            fmt_sig9(record.power),
            fmt_sig9(record.velocity),
            fmt_sig9(record.feed_rate),
            fmt_sig9(record.beam_radius),
            fmt_sig9(record.width),
            fmt_sig9(record.height),
            fmt_sig9(record.depth),
            fmt_sig9(dilution_stored),
            label.value.as_u8(),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes the dataset in the canonical CSV schema.
pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    save_dataset_with_comments(dataset, path, &[])
}

/// Loads a dataset, re-validating every invariant. Labels are recomputed
/// from geometry and must agree with the stored ones.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;

    let header = reader.headers()?.clone();
    let expected: Vec<&str> = CSV_HEADER.to_vec();
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::Parse {
            row: 1,
            message: format!("unexpected header: {}", got.join(",")),
        });
    }

    let mut records = Vec::new();
    let mut stored_labels = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 2; // header is row 1
        let row = row?;
        if row.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                row: row_no,
                message: format!("expected {} fields, got {}", CSV_HEADER.len(), row.len()),
            });
        }
        let field = |idx: usize| row.get(idx).unwrap_or("");
        let parse_f64 = |idx: usize| -> Result<f64> {
            field(idx).parse::<f64>().map_err(|e| Error::Parse {
                row: row_no,
                message: format!("field `{}`: {e}", CSV_HEADER[idx]),
            })
        };
        let id = field(0).parse::<u64>().map_err(|e| Error::Parse {
            row: row_no,
            message: format!("field `id`: {e}"),
        })?;
        let source = Source::from_str(field(1)).map_err(|e| Error::Parse {
            row: row_no,
            message: e,
        })?;
        let record = CladRecord::new(
            id,
            source,
            parse_f64(2)?,
            parse_f64(3)?,
            parse_f64(4)?,
            parse_f64(5)?,
            parse_f64(6)?,
            parse_f64(7)?,
            parse_f64(8)?,
        )?;
        let dilution = parse_f64(9)?;
        let label_raw = field(10).parse::<u8>().map_err(|e| Error::Parse {
            row: row_no,
            message: format!("field `label`: {e}"),
        })?;
        stored_labels.push((row_no, dilution, QualityClass::from_u8(label_raw)?));
        records.push(record);
    }

    let dataset = Dataset::from_records(records)?;
    for (label, (row_no, stored_dilution, stored_class)) in
        dataset.labels.iter().zip(&stored_labels)
    {
        // Dilution is stored at 9 significant digits and recomputed here from
        // geometry that was itself rounded to 9 digits, so allow the combined
        // rounding error.
        if (label.dilution - stored_dilution).abs() > 1e-8 {
            return Err(Error::Integrity(format!(
                "row {row_no}: stored dilution {} disagrees with recomputed {}",
                stored_dilution, label.dilution
            )));
        }
        if label.value != *stored_class {
            return Err(Error::Integrity(format!(
                "row {row_no}: stored label {} disagrees with recomputed {}",
                stored_class.as_u8(),
                label.value.as_u8()
            )));
        }
    }
    Ok(dataset)
}

/// Index sets produced by the splitters. A holdout split fills `train` and
/// `test`; a k-fold split fills `folds`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub folds: Vec<Vec<usize>>,
}

/// Seeded random holdout split over `n` rows. The test size is
/// `round(n · test_fraction)`, rounding half up.
pub fn train_test_split(n: usize, test_fraction: f64, seed: u64) -> Result<SplitIndices> {
    if n < 2 {
        return Err(Error::Split(format!("need at least 2 rows, got {n}")));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!(
            "test_fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let test_size = (n as f64 * test_fraction + 0.5).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, seed);
    let mut test: Vec<usize> = order[..test_size].to_vec();
    let mut train: Vec<usize> = order[test_size..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok(SplitIndices {
        train,
        test,
        folds: Vec::new(),
    })
}

/// Seeded k-fold partition of `0..n`. Fold sizes differ by at most one.
pub fn k_fold_indices(n: usize, k: usize, seed: u64) -> Result<SplitIndices> {
    if k < 2 || k > n {
        return Err(Error::Split(format!(
            "k must satisfy 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, seed);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        let mut fold: Vec<usize> = order[start..start + size].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += size;
    }
    Ok(SplitIndices {
        train: Vec::new(),
        test: Vec::new(),
        folds,
    })
}

fn shuffle(indices: &mut [usize], seed: u64) {
    use rand::seq::SliceRandom;
    let mut rng = seeded(seed);
    indices.shuffle(&mut rng);
}

/// Min/max/mean/std plus a fixed 20-bin histogram for one geometry channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
    pub histogram: Vec<usize>,
}

pub const HISTOGRAM_BINS: usize = 20;

fn field_stats(values: &[f64]) -> FieldStats {
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mut histogram = vec![0usize; HISTOGRAM_BINS];
    let span = max - min;
    for &v in values {
        let bin = if span == 0.0 {
            0
        } else {
            (((v - min) / span * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
        };
        histogram[bin] += 1;
    }
    FieldStats {
        min,
        max,
        mean,
        std: var.sqrt(),
        histogram,
    }
}

/// Per-channel statistics and label occurrence counts for a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub width: FieldStats,
    pub height: FieldStats,
    pub depth: FieldStats,
    /// (desirable, undesirable) occurrence counts.
    pub label_counts: (usize, usize),
}

/// Summarizes the geometry distributions and label occurrences.
pub fn summarize_distribution(dataset: &Dataset) -> Result<DistributionSummary> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("summarize_distribution needs rows"));
    }
    let widths: Vec<f64> = dataset.records.iter().map(|r| r.width).collect();
    let heights: Vec<f64> = dataset.records.iter().map(|r| r.height).collect();
    let depths: Vec<f64> = dataset.records.iter().map(|r| r.depth).collect();
    let desirable = dataset
        .labels
        .iter()
        .filter(|l| l.value == QualityClass::Desirable)
        .count();
    Ok(DistributionSummary {
        n: dataset.len(),
        width: field_stats(&widths),
        height: field_stats(&heights),
        depth: field_stats(&depths),
        label_counts: (desirable, dataset.len() - desirable),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn record(depth: f64, height: f64) -> CladRecord {
        CladRecord::new(0, Source::Synthetic, 300.0, 10.0, 0.2, 0.5, 800.0, height, depth)
            .unwrap()
    }

    #[test]
    fn dilution_zero_depth() {
        assert_eq!(compute_dilution(0.0, 300.0).unwrap(), 0.0);
    }

    #[test]
    fn dilution_symmetric() {
        assert_eq!(compute_dilution(250.0, 250.0).unwrap(), 0.5);
    }

    #[test]
    fn dilution_hand_value() {
        assert_relative_eq!(compute_dilution(200.0, 300.0).unwrap(), 0.4, epsilon = 0.0);
    }

    #[test]
    fn dilution_degenerate_rejected() {
        assert!(matches!(
            compute_dilution(0.0, 0.0),
            Err(Error::DegenerateRecord)
        ));
    }

    #[test]
    fn label_examples() {
        assert_eq!(
            label_quality(&record(200.0, 300.0)).unwrap().value,
            QualityClass::Desirable
        );
        assert_eq!(
            label_quality(&record(0.0, 300.0)).unwrap().value,
            QualityClass::Undesirable
        );
        // dilution 1.0: only a melt pool, no clad.
        assert_eq!(
            label_quality(&record(300.0, 0.0)).unwrap().value,
            QualityClass::Undesirable
        );
    }

    #[test]
    fn label_boundaries_inclusive() {
        // dilution exactly 0.20 and 0.50
        assert_eq!(
            label_quality(&record(20.0, 80.0)).unwrap().value,
            QualityClass::Desirable
        );
        assert_eq!(
            label_quality(&record(50.0, 50.0)).unwrap().value,
            QualityClass::Desirable
        );
    }

    #[test]
    fn label_uses_same_expression_as_compute_dilution() {
        let r = record(137.0, 911.0);
        let label = label_quality(&r).unwrap();
        assert_eq!(label.dilution, compute_dilution(r.depth, r.height).unwrap());
    }

    #[test]
    fn record_invariants() {
        assert!(CladRecord::new(0, Source::Cfd, 0.0, 10.0, 0.2, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(CladRecord::new(0, Source::Cfd, 300.0, 0.0, 0.2, 0.5, 1.0, 1.0, 1.0).is_err());
        assert!(matches!(
            CladRecord::new(0, Source::Cfd, 300.0, 10.0, 0.2, 0.5, 1.0, 0.0, 0.0),
            Err(Error::DegenerateRecord)
        ));
    }

    #[test]
    fn synthesize_composition() {
        let config = SurrogateConfig {
            n_experiment: 90,
            n_cfd: 235,
            seed: 7,
            ..SurrogateConfig::default()
        };
        let ds = synthesize_dataset(&config).unwrap();
        assert_eq!(ds.len(), 325);
        let n_exp = ds
            .records()
            .iter()
            .filter(|r| r.source == Source::Experiment)
            .count();
        assert_eq!(n_exp, 90);
    }

    #[test]
    fn synthesize_deterministic() {
        let config = SurrogateConfig {
            noise_sd: 0.0,
            seed: 42,
            n_experiment: 10,
            n_cfd: 10,
            ..SurrogateConfig::default()
        };
        let a = synthesize_dataset(&config).unwrap();
        let b = synthesize_dataset(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn surrogate_surface_hand_value() {
        // E = 1 J/mm³, lambda = 0 -> width exactly 180 µm before noise.
        let (w, _, _) = surrogate_geometry(1.0, 0.0, 0.025);
        assert_eq!(w, 180.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let config = SurrogateConfig {
            n_experiment: 0,
            n_cfd: 0,
            ..SurrogateConfig::default()
        };
        assert!(matches!(synthesize_dataset(&config), Err(Error::Config(_))));
    }

    #[test]
    fn split_325_gives_65_test() {
        let split = train_test_split(325, 0.2, 1).unwrap();
        assert_eq!(split.test.len(), 65);
        assert_eq!(split.train.len(), 260);
    }

    #[test]
    fn split_deterministic_and_partition() {
        let a = train_test_split(101, 0.3, 5).unwrap();
        let b = train_test_split(101, 0.3, 5).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());
    }

    #[test]
    fn split_two_rows() {
        let split = train_test_split(2, 0.5, 9).unwrap();
        assert_eq!(split.train.len(), 1);
        assert_eq!(split.test.len(), 1);
        assert_ne!(split.train[0], split.test[0]);
    }

    #[test]
    fn split_too_small() {
        assert!(matches!(train_test_split(1, 0.5, 0), Err(Error::Split(_))));
    }

    #[test]
    fn k_fold_sizes() {
        let split = k_fold_indices(10, 5, 3).unwrap();
        assert!(split.folds.iter().all(|f| f.len() == 2));
        let split = k_fold_indices(7, 3, 3).unwrap();
        let mut sizes: Vec<usize> = split.folds.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 3]);
    }

    #[test]
    fn k_fold_bounds() {
        assert!(k_fold_indices(5, 6, 0).is_err());
        assert!(k_fold_indices(5, 1, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let config = SurrogateConfig {
            n_experiment: 8,
            n_cfd: 9,
            seed: 11,
            ..SurrogateConfig::default()
        };
        let ds = synthesize_dataset(&config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        save_dataset(&ds, &p1).unwrap();
        let loaded = load_dataset(&p1).unwrap();
        assert_eq!(loaded.len(), ds.len());
        save_dataset(&loaded, &p2).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap(),
            "stored precision must be a fixed point of save/load"
        );
    }

    #[test]
    fn csv_empty_file_ok() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.csv");
        std::fs::write(&p, format!("{}\n", CSV_HEADER.join(","))).unwrap();
        assert_eq!(load_dataset(&p).unwrap().len(), 0);
    }

    #[test]
    fn csv_invariant_violation() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(
            &p,
            format!(
                "{}\n0,CFD,300.0,0.0,0.2,0.5,800.0,100.0,50.0,0.333333333,0\n",
                CSV_HEADER.join(",")
            ),
        )
        .unwrap();
        assert!(matches!(
            load_dataset(&p),
            Err(Error::Validation { field: "velocity", .. })
        ));
    }

    #[test]
    fn csv_malformed_row_names_row_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(
            &p,
            format!(
                "{}\n0,CFD,300.0,10.0,0.2,0.5,800.0,100.0,50.0,0.333333333,0\n1,CFD,oops,10.0,0.2,0.5,800.0,100.0,50.0,0.333333333,0\n",
                CSV_HEADER.join(",")
            ),
        )
        .unwrap();
        match load_dataset(&p) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_label_mismatch_is_integrity_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        // dilution 50/150 = 1/3 -> desirable (0), stored as 1.
        std::fs::write(
            &p,
            format!(
                "{}\n0,CFD,300.0,10.0,0.2,0.5,800.0,100.0,50.0,3.33333333e-1,1\n",
                CSV_HEADER.join(",")
            ),
        )
        .unwrap();
        assert!(matches!(load_dataset(&p), Err(Error::Integrity(_))));
    }

    #[test]
    fn summary_examples() {
        let records = vec![
            record_with(0, 1.0, 200.0, 300.0),
            record_with(1, 2.0, 200.0, 300.0),
            record_with(2, 3.0, 200.0, 300.0),
            record_with(3, 3.0, 0.0, 300.0),
        ];
        let ds = Dataset::from_records(records).unwrap();
        let s = summarize_distribution(&ds).unwrap();
        assert_eq!(s.width.min, 1.0);
        assert_eq!(s.width.max, 3.0);
        assert_relative_eq!(s.width.mean, 2.25);
        assert_eq!(s.label_counts, (3, 1));
    }

    #[test]
    fn summary_constant_field() {
        let ds = Dataset::from_records(vec![
            record_with(0, 5.0, 200.0, 300.0),
            record_with(1, 5.0, 200.0, 300.0),
        ])
        .unwrap();
        let s = summarize_distribution(&ds).unwrap();
        assert_eq!(s.width.std, 0.0);
        assert_eq!(s.width.histogram.iter().filter(|&&c| c > 0).count(), 1);
    }

    #[test]
    fn summary_empty_rejected() {
        let ds = Dataset::from_records(Vec::new()).unwrap();
        assert!(matches!(
            summarize_distribution(&ds),
            Err(Error::EmptyInput(_))
        ));
    }

    fn record_with(id: u64, width: f64, depth: f64, height: f64) -> CladRecord {
        CladRecord::new(id, Source::Synthetic, 300.0, 10.0, 0.2, 0.5, width, height, depth)
            .unwrap()
    }

    proptest! {
        #[test]
        fn k_fold_is_partition(n in 2usize..60, k in 2usize..10, seed in 0u64..1000) {
            prop_assume!(k <= n);
            let split = k_fold_indices(n, k, seed).unwrap();
            let mut all: Vec<usize> = split.folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = split.folds.iter().map(Vec::len).collect();
            let min = sizes.iter().min().unwrap();
            let max = sizes.iter().max().unwrap();
            prop_assert!(max - min <= 1);
        }

        #[test]
        fn holdout_is_partition(n in 2usize..200, frac in 0.05f64..0.95, seed in 0u64..1000) {
            let split = train_test_split(n, frac, seed).unwrap();
            let mut all: Vec<usize> = split.train.iter().chain(&split.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert_eq!(split.test.len(), (n as f64 * frac + 0.5).floor() as usize);
        }

        #[test]
        fn dilution_in_unit_interval(depth in 0.0f64..1e4, height in 0.0f64..1e4) {
            prop_assume!(depth + height > 0.0);
            let d = compute_dilution(depth, height).unwrap();
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
