//! Featurization and min-max normalization.
//!
//! Models see either the raw machine settings (power, velocity) or the full
//! four-feature set that adds two physics-aware quantities: volumetric energy
//! density `E = P / (v·π·r²)` and linear mass density `λ = ṁ / v`. Inputs are
//! min-max normalized with parameters fitted on training data only.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::data::{CladRecord, Dataset};
use crate::error::{Error, Result};

/// Which feature columns a model sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureSetKind {
    /// Machine settings only: power, velocity.
    MachineOnly,
    /// Machine settings plus energy density and mass density (the default).
    Full,
}

impl FeatureSetKind {
    pub fn n_features(self) -> usize {
        match self {
            FeatureSetKind::MachineOnly => 2,
            FeatureSetKind::Full => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSetKind::MachineOnly => "machine",
            FeatureSetKind::Full => "full",
        }
    }

    pub fn feature_names(self) -> &'static [&'static str] {
        match self {
            FeatureSetKind::MachineOnly => &["power_w", "velocity_mm_s"],
            FeatureSetKind::Full => &[
                "power_w",
                "velocity_mm_s",
                "energy_density_j_mm3",
                "mass_density_g_mm",
            ],
        }
    }
}

impl FromStr for FeatureSetKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "machine" => Ok(FeatureSetKind::MachineOnly),
            "full" => Ok(FeatureSetKind::Full),
            other => Err(format!("unknown feature set `{other}`")),
        }
    }
}

/// Volumetric energy density `P / (v·π·r²)` in J/mm³.
pub fn volumetric_energy_density(power: f64, velocity: f64, radius: f64) -> Result<f64> {
    if power < 0.0 || !power.is_finite() {
        return Err(Error::Domain(format!("power must be >= 0, got {power}")));
    }
    if velocity <= 0.0 || !velocity.is_finite() {
        return Err(Error::Domain(format!(
            "velocity must be > 0, got {velocity}"
        )));
    }
    if radius <= 0.0 || !radius.is_finite() {
        return Err(Error::Domain(format!("radius must be > 0, got {radius}")));
    }
    Ok(power / (velocity * std::f64::consts::PI * radius * radius))
}

/// Linear mass density `ṁ / v` in g/mm.
pub fn linear_mass_density(feed_rate: f64, velocity: f64) -> Result<f64> {
    if feed_rate < 0.0 || !feed_rate.is_finite() {
        return Err(Error::Domain(format!(
            "feed_rate must be >= 0, got {feed_rate}"
        )));
    }
    if velocity <= 0.0 || !velocity.is_finite() {
        return Err(Error::Domain(format!(
            "velocity must be > 0, got {velocity}"
        )));
    }
    Ok(feed_rate / velocity)
}

/// All four feature values for one record. The derived quantities are always
/// computed; `kind` controls which components are visible to a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub power: f64,
    pub velocity: f64,
    pub energy_density: f64,
    pub mass_density: f64,
    pub kind: FeatureSetKind,
}

impl FeatureVector {
    /// The components a model of this feature-set kind may see.
    pub fn model_inputs(&self) -> Vec<f64> {
        match self.kind {
            FeatureSetKind::MachineOnly => vec![self.power, self.velocity],
            FeatureSetKind::Full => vec![
                self.power,
                self.velocity,
                self.energy_density,
                self.mass_density,
            ],
        }
    }
}

/// Computes a feature vector directly from process inputs.
pub fn features_from_inputs(
    power: f64,
    velocity: f64,
    feed_rate: f64,
    beam_radius: f64,
    kind: FeatureSetKind,
) -> Result<FeatureVector> {
    Ok(FeatureVector {
        power,
        velocity,
        energy_density: volumetric_energy_density(power, velocity, beam_radius)?,
        mass_density: linear_mass_density(feed_rate, velocity)?,
        kind,
    })
}

/// Computes the feature vector of a record.
pub fn featurize(record: &CladRecord, kind: FeatureSetKind) -> Result<FeatureVector> {
    features_from_inputs(
        record.power,
        record.velocity,
        record.feed_rate,
        record.beam_radius,
        kind,
    )
}

/// Model-visible feature matrix for a whole dataset, row per record.
pub fn feature_matrix(dataset: &Dataset, kind: FeatureSetKind) -> Result<Vec<Vec<f64>>> {
    dataset
        .records()
        .iter()
        .map(|r| featurize(r, kind).map(|fv| fv.model_inputs()))
        .collect()
}

/// Columnwise min/max fitted on training data only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    /// Identity parameters: normalization becomes a no-op for `d` columns.
    pub fn identity(d: usize) -> Self {
        NormalizationParams {
            min: vec![0.0; d],
            max: vec![1.0; d],
        }
    }

    pub fn n_features(&self) -> usize {
        self.min.len()
    }

    /// Normalizes one row in place-free style.
    pub fn normalize_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.min.len() {
            return Err(Error::Shape(format!(
                "row has {} columns, params expect {}",
                row.len(),
                self.min.len()
            )));
        }
        Ok(row
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| if hi == lo { 0.0 } else { (x - lo) / (hi - lo) })
            .collect())
    }

    fn denormalize_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.min.len() {
            return Err(Error::Shape(format!(
                "row has {} columns, params expect {}",
                row.len(),
                self.min.len()
            )));
        }
        Ok(row
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| if hi == lo { lo } else { lo + x * (hi - lo) })
            .collect())
    }
}

/// Fits min-max parameters on a training matrix (columnwise extrema).
pub fn fit_normalizer(training: &[Vec<f64>]) -> Result<NormalizationParams> {
    let first = training
        .first()
        .ok_or(Error::EmptyInput("fit_normalizer needs at least one row"))?;
    let d = first.len();
    let mut min = first.clone();
    let mut max = first.clone();
    for row in &training[1..] {
        if row.len() != d {
            return Err(Error::Shape(format!(
                "ragged matrix: expected {d} columns, found {}",
                row.len()
            )));
        }
        for j in 0..d {
            min[j] = min[j].min(row[j]);
            max[j] = max[j].max(row[j]);
        }
    }
    Ok(NormalizationParams { min, max })
}

/// Applies `x' = (x − min)/(max − min)` columnwise. Constant columns map to
/// zero. Values outside the training range are not clipped.
pub fn normalize(params: &NormalizationParams, matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    matrix.iter().map(|row| params.normalize_row(row)).collect()
}

/// Exact inverse of [`normalize`] on non-constant columns; constant columns
/// map back to their training value.
pub fn denormalize(params: &NormalizationParams, matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    matrix
        .iter()
        .map(|row| params.denormalize_row(row))
        .collect()
}
