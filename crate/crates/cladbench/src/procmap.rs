//! Printability process maps: trained models evaluated over a
//! (power, velocity) grid.
//!
//! Maps are row-major with velocity as rows and power as columns, matching
//! the power-on-x-axis figure convention. Feed rate and beam radius are
//! fixed per map and recorded in every export. Node values equal direct
//! `predict` calls on identically constructed inputs, bitwise.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Target, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::features::features_from_inputs;
use crate::models::{Task, TrainedModel};

/// Rectangular evaluation grid with the remaining process inputs fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// (min W, max W, steps)
    pub power_axis: (f64, f64, usize),
    /// (min mm/s, max mm/s, steps)
    pub velocity_axis: (f64, f64, usize),
    /// Fixed powder feed rate, g/s.
    pub feed_rate: f64,
    /// Fixed beam radius, mm.
    pub beam_radius: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi, steps)) in [
            ("power_axis", self.power_axis),
            ("velocity_axis", self.velocity_axis),
        ] {
            if steps < 2 {
                return Err(Error::Config(format!("{name} needs at least 2 steps")));
            }
            if !(lo.is_finite() && hi.is_finite() && lo < hi && lo > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must satisfy 0 < min < max, got ({lo}, {hi})"
                )));
            }
        }
        if !(self.feed_rate.is_finite() && self.feed_rate > 0.0) {
            return Err(Error::Config(format!(
                "feed_rate must be > 0, got {}",
                self.feed_rate
            )));
        }
        if !(self.beam_radius.is_finite() && self.beam_radius > 0.0) {
            return Err(Error::Config(format!(
                "beam_radius must be > 0, got {}",
                self.beam_radius
            )));
        }
        Ok(())
    }

    pub fn power_values(&self) -> Vec<f64> {
        linspace(self.power_axis)
    }

    pub fn velocity_values(&self) -> Vec<f64> {
        linspace(self.velocity_axis)
    }
}

fn linspace((lo, hi, steps): (f64, f64, usize)) -> Vec<f64> {
    let step = (hi - lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| if i + 1 == steps { hi } else { lo + i as f64 * step })
        .collect()
}

/// What a map's cell values mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    Width,
    Height,
    Depth,
    QualityClass,
    QualityProb,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Width => "width",
            MapKind::Height => "height",
            MapKind::Depth => "depth",
            MapKind::QualityClass => "quality_class",
            MapKind::QualityProb => "quality_prob",
        }
    }
}

/// A filled grid of predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessMap {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub kind: MapKind,
    /// Reference to the model that produced the map (artifact hash or name).
    pub model_ref: String,
    /// Row-major: `values[velocity_row][power_col]`.
    pub values: Vec<Vec<f64>>,
}

impl ProcessMap {
    fn new(grid: GridSpec, kind: MapKind, model_ref: String, values: Vec<Vec<f64>>) -> Self {
        ProcessMap {
            schema_version: SCHEMA_VERSION,
            grid,
            kind,
            model_ref,
            values,
        }
    }
}

/// Normalized model inputs for every grid node, row-major.
fn grid_inputs(model: &TrainedModel, grid: &GridSpec) -> Result<Vec<Vec<f64>>> {
    let feature_kind = model
        .fit_meta
        .feature_kind
        .ok_or_else(|| Error::Task("model artifact lacks a feature-set kind".into()))?;
    let mut rows = Vec::with_capacity(grid.velocity_axis.2 * grid.power_axis.2);
    for &v in &grid.velocity_values() {
        for &p in &grid.power_values() {
            let fv = features_from_inputs(p, v, grid.feed_rate, grid.beam_radius, feature_kind)?;
            rows.push(model.normalizer.normalize_row(&fv.model_inputs())?);
        }
    }
    Ok(rows)
}

fn to_matrix(flat: Vec<f64>, n_rows: usize, n_cols: usize) -> Vec<Vec<f64>> {
    flat.chunks(n_cols).take(n_rows).map(<[f64]>::to_vec).collect()
}

/// Evaluates a regression model over the grid. The map kind comes from the
/// target recorded at fit time.
pub fn predict_geometry_map(model: &TrainedModel, grid: &GridSpec) -> Result<ProcessMap> {
    grid.validate()?;
    if model.task != Task::Regression {
        return Err(Error::Task(
            "geometry maps need a regression model; got a classifier".into(),
        ));
    }
    let kind = match model.fit_meta.target.as_deref().map(Target::from_str) {
        Some(Ok(Target::Width)) => MapKind::Width,
        Some(Ok(Target::Height)) => MapKind::Height,
        Some(Ok(Target::Depth)) => MapKind::Depth,
        _ => MapKind::Width,
    };
    let inputs = grid_inputs(model, grid)?;
    let flat = model.predict(&inputs)?;
    let values = to_matrix(flat, grid.velocity_axis.2, grid.power_axis.2);
    Ok(ProcessMap::new(
        grid.clone(),
        kind,
        model.spec.kind.name().to_string(),
        values,
    ))
}

/// Evaluates a classifier over the grid, producing the class map and its
/// probability companion. Class 0 regions are the desirable process window.
pub fn predict_quality_map(
    model: &TrainedModel,
    grid: &GridSpec,
) -> Result<(ProcessMap, ProcessMap)> {
    grid.validate()?;
    if model.task != Task::Classification {
        return Err(Error::Task(
            "quality maps need a classifier; got a regression model".into(),
        ));
    }
    let inputs = grid_inputs(model, grid)?;
    let proba = model.predict_proba(&inputs)?;
    let class: Vec<f64> = proba
        .iter()
        .map(|&p| f64::from(u8::from(p > 0.5)))
        .collect();
    let (rows, cols) = (grid.velocity_axis.2, grid.power_axis.2);
    let model_ref = model.spec.kind.name().to_string();
    Ok((
        ProcessMap::new(
            grid.clone(),
            MapKind::QualityClass,
            model_ref.clone(),
            to_matrix(class, rows, cols),
        ),
        ProcessMap::new(
            grid.clone(),
            MapKind::QualityProb,
            model_ref,
            to_matrix(proba, rows, cols),
        ),
    ))
}

/// Export formats for a process map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Csv,
    Json,
    Svg,
}

impl FromStr for MapFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(MapFormat::Csv),
            "json" => Ok(MapFormat::Json),
            "svg" => Ok(MapFormat::Svg),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Writes a map in the requested format.
pub fn export_map(map: &ProcessMap, format: MapFormat, path: &Path) -> Result<()> {
    match format {
        MapFormat::Csv => write_csv(map, path, &[]),
        MapFormat::Json => {
            let mut doc = serde_json::to_string_pretty(map)?;
            doc.push('\n');
            std::fs::write(path, doc)?;
            Ok(())
        }
        MapFormat::Svg => write_svg(map, path, &[]),
    }
}

/// CSV export: `#` metadata comments, then one `velocity_mm_s,power_w,value`
/// row per node, row-major.
pub fn write_csv(map: &ProcessMap, path: &Path, comments: &[String]) -> Result<()> {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(
        out,
        "# kind={} model={} feed_rate_g_s={} beam_radius_mm={} schema_version={}",
        map.kind.name(),
        map.model_ref,
        map.grid.feed_rate,
        map.grid.beam_radius,
        map.schema_version
    );
    out.push_str("velocity_mm_s,power_w,value\n");
    let powers = map.grid.power_values();
    let velocities = map.grid.velocity_values();
    for (vi, v) in velocities.iter().enumerate() {
        for (pi, p) in powers.iter().enumerate() {
            let _ = writeln!(out, "{v},{p},{}", map.values[vi][pi]);
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Axes and row-major values recovered from a map CSV.
pub type MapCsvContent = (Vec<f64>, Vec<f64>, Vec<Vec<f64>>);

/// Reads back a CSV written by [`write_csv`]: the two axes plus the
/// row-major value matrix.
pub fn read_map_csv(path: &Path) -> Result<MapCsvContent> {
    let text = std::fs::read_to_string(path)?;
    let mut velocities: Vec<f64> = Vec::new();
    let mut powers: Vec<f64> = Vec::new();
    let mut triples: Vec<(f64, f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.is_empty() || line.starts_with("velocity_mm_s") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                row: i + 1,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|e| Error::Parse {
                row: i + 1,
                message: format!("{e}"),
            })
        };
        let v = parse(fields[0])?;
        let p = parse(fields[1])?;
        let value = parse(fields[2])?;
        if velocities.last() != Some(&v) && !velocities.contains(&v) {
            velocities.push(v);
        }
        if !powers.contains(&p) {
            powers.push(p);
        }
        triples.push((v, p, value));
    }
    let mut values = vec![vec![0.0; powers.len()]; velocities.len()];
    for (v, p, value) in triples {
        let vi = velocities.iter().position(|&x| x == v).unwrap();
        let pi = powers.iter().position(|&x| x == p).unwrap();
        values[vi][pi] = value;
    }
    Ok((velocities, powers, values))
}

/// SVG heatmap: one rect per grid node, linear blue-to-red color scale
/// (fixed to [0,1] for quality maps, data range otherwise), optional overlay
/// points given as (velocity, power) pairs.
pub fn write_svg(map: &ProcessMap, path: &Path, overlay: &[(f64, f64)]) -> Result<()> {
    let powers = map.grid.power_values();
    let velocities = map.grid.velocity_values();
    let dp = (map.grid.power_axis.1 - map.grid.power_axis.0) / (powers.len() - 1) as f64;
    let dv = (map.grid.velocity_axis.1 - map.grid.velocity_axis.0) / (velocities.len() - 1) as f64;

    let (lo, hi) = match map.kind {
        MapKind::QualityClass | MapKind::QualityProb => (0.0, 1.0),
        _ => {
            let flat = map.values.iter().flatten();
            let lo = flat.clone().copied().fold(f64::INFINITY, f64::min);
            let hi = flat.copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        }
    };

    let x0 = map.grid.power_axis.0 - dp / 2.0;
    let y0 = map.grid.velocity_axis.0 - dv / 2.0;
    let width = map.grid.power_axis.1 - map.grid.power_axis.0 + dp;
    let height = map.grid.velocity_axis.1 - map.grid.velocity_axis.0 + dv;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{x0} {y0} {width} {height}" preserveAspectRatio="none">"#
    );
    let _ = writeln!(out, "<!--");
    let _ = writeln!(out, "  kind: {}", map.kind.name());
    let _ = writeln!(out, "  model: {}", map.model_ref);
    let _ = writeln!(
        out,
        "  grid: power {:?} velocity {:?} feed_rate_g_s {} beam_radius_mm {}",
        map.grid.power_axis, map.grid.velocity_axis, map.grid.feed_rate, map.grid.beam_radius
    );
    let _ = writeln!(
        out,
        "  color scale: linear rgb(59,76,192) at {lo} to rgb(180,4,38) at {hi}"
    );
    let _ = writeln!(
        out,
        "  axes: power on x (left = {} W), velocity on y (top = {} mm/s)",
        map.grid.power_axis.0, map.grid.velocity_axis.0
    );
    let _ = writeln!(out, "-->");
    for (vi, v) in velocities.iter().enumerate() {
        for (pi, p) in powers.iter().enumerate() {
            let t = if hi > lo {
                ((map.values[vi][pi] - lo) / (hi - lo)).clamp(0.0, 1.0)
            } else {
                0.5
            };
            let r = (59.0 + t * (180.0 - 59.0)).round() as u8;
            let g = (76.0 + t * (4.0 - 76.0)).round() as u8;
            let b = (192.0 + t * (38.0 - 192.0)).round() as u8;
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{dp}" height="{dv}" fill="rgb({r},{g},{b})"/>"#,
                p - dp / 2.0,
                v - dv / 2.0
            );
        }
    }
    for (v, p) in overlay {
        let _ = writeln!(
            out,
            r#"<circle cx="{p}" cy="{v}" r="{}" fill="none" stroke="black" stroke-width="{}"/>"#,
            dp.min(dv) * 0.25,
            dp.min(dv) * 0.05
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthesize_dataset, SurrogateConfig, Target};
    use crate::eval::fit_on_indices;
    use crate::features::FeatureSetKind;
    use crate::models::{EstimatorKind, EstimatorSpec};

    fn grid() -> GridSpec {
        GridSpec {
            power_axis: (100.0, 500.0, 2),
            velocity_axis: (2.0, 20.0, 2),
            feed_rate: 0.2,
            beam_radius: 0.5,
        }
    }

    fn trained(kind: EstimatorKind, target: Target) -> crate::models::TrainedModel {
        let ds = synthesize_dataset(&SurrogateConfig {
            n_experiment: 40,
            n_cfd: 40,
            noise_sd: 0.02,
            seed: 3,
            ..SurrogateConfig::default()
        })
        .unwrap();
        let all: Vec<usize> = (0..ds.len()).collect();
        let spec = match kind {
            EstimatorKind::Gbr => EstimatorSpec::new(kind)
                .with_int("n_estimators", 60)
                .with_real("learning_rate", 0.1)
                .with_int("max_depth", 3),
            EstimatorKind::Gnb => EstimatorSpec::new(kind),
            k => EstimatorSpec::new(k),
        };
        fit_on_indices(&spec, &ds, FeatureSetKind::Full, target, &all).unwrap()
    }

    #[test]
    fn map_layout_is_row_major_velocity_rows() {
        let model = trained(EstimatorKind::Gbr, Target::Width);
        let map = predict_geometry_map(&model, &grid()).unwrap();
        assert_eq!(map.values.len(), 2);
        assert_eq!(map.values[0].len(), 2);
        assert_eq!(map.kind, MapKind::Width);

        // node values equal direct predict() calls, bitwise
        let fv = features_from_inputs(500.0, 2.0, 0.2, 0.5, FeatureSetKind::Full).unwrap();
        let row = model.normalizer.normalize_row(&fv.model_inputs()).unwrap();
        let direct = model.predict(&[row]).unwrap()[0];
        assert_eq!(map.values[0][1], direct);
    }

    #[test]
    fn constant_regressor_gives_uniform_map() {
        // dt with depth 1 on constant target predicts one value
        let ds = synthesize_dataset(&SurrogateConfig {
            n_experiment: 10,
            n_cfd: 0,
            noise_sd: 0.0,
            seed: 1,
            ..SurrogateConfig::default()
        })
        .unwrap();
        let spec = EstimatorSpec::new(EstimatorKind::Gbr).with_real("learning_rate", 0.0);
        let all: Vec<usize> = (0..ds.len()).collect();
        let model = fit_on_indices(&spec, &ds, FeatureSetKind::Full, Target::Width, &all).unwrap();
        let map = predict_geometry_map(&model, &grid()).unwrap();
        let first = map.values[0][0];
        assert!(map.values.iter().flatten().all(|&v| v == first));
    }

    #[test]
    fn quality_map_class_is_thresholded_probability() {
        let model = trained(EstimatorKind::Gnb, Target::Quality);
        let g = GridSpec {
            power_axis: (100.0, 500.0, 7),
            velocity_axis: (2.0, 20.0, 5),
            feed_rate: 0.2,
            beam_radius: 0.5,
        };
        let (class_map, prob_map) = predict_quality_map(&model, &g).unwrap();
        for (crow, prow) in class_map.values.iter().zip(&prob_map.values) {
            for (&c, &p) in crow.iter().zip(prow) {
                assert!((0.0..=1.0).contains(&p));
                assert_eq!(c, f64::from(u8::from(p > 0.5)));
            }
        }
    }

    #[test]
    fn task_mismatch_is_rejected() {
        let reg = trained(EstimatorKind::Gbr, Target::Width);
        assert!(matches!(
            predict_quality_map(&reg, &grid()),
            Err(Error::Task(_))
        ));
        let clf = trained(EstimatorKind::Gnb, Target::Quality);
        assert!(matches!(
            predict_geometry_map(&clf, &grid()),
            Err(Error::Task(_))
        ));
    }

    #[test]
    fn csv_export_round_trips() {
        let model = trained(EstimatorKind::Gbr, Target::Width);
        let g = GridSpec {
            power_axis: (100.0, 500.0, 4),
            velocity_axis: (2.0, 20.0, 3),
            feed_rate: 0.2,
            beam_radius: 0.5,
        };
        let map = predict_geometry_map(&model, &g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.csv");
        export_map(&map, MapFormat::Csv, &path).unwrap();

        let data_rows = std::fs::read_to_string(&path)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("velocity"))
            .count();
        assert_eq!(data_rows, 12);

        let (v_axis, p_axis, values) = read_map_csv(&path).unwrap();
        assert_eq!(v_axis.len(), 3);
        assert_eq!(p_axis.len(), 4);
        for (a, b) in map.values.iter().flatten().zip(values.iter().flatten()) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn json_export_round_trips_exactly() {
        let model = trained(EstimatorKind::Gbr, Target::Width);
        let map = predict_geometry_map(&model, &grid()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.json");
        export_map(&map, MapFormat::Json, &path).unwrap();
        let loaded: ProcessMap =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(loaded, map);
    }

    #[test]
    fn svg_has_one_rect_per_node() {
        let model = trained(EstimatorKind::Gbr, Target::Width);
        let g = GridSpec {
            power_axis: (100.0, 500.0, 5),
            velocity_axis: (2.0, 20.0, 4),
            feed_rate: 0.2,
            beam_radius: 0.5,
        };
        let map = predict_geometry_map(&model, &g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.svg");
        export_map(&map, MapFormat::Svg, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("<rect").count(), 20);
    }

    #[test]
    fn invalid_grid_rejected() {
        let mut g = grid();
        g.power_axis = (100.0, 500.0, 1);
        assert!(matches!(g.validate(), Err(Error::Config(_))));
        let mut g = grid();
        g.velocity_axis = (20.0, 2.0, 5);
        assert!(matches!(g.validate(), Err(Error::Config(_))));
    }
}
