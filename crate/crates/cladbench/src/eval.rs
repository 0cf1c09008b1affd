//! Metrics, cross-validation, and benchmark report assembly.
//!
//! Metrics that are mathematically undefined on their inputs (R² of a
//! constant target, ROC of single-class labels) raise typed errors instead
//! of returning NaN. Cross-validation re-fits the min-max normalizer inside
//! each fold on that fold's training rows only.

use serde::{Deserialize, Serialize};

use crate::data::{k_fold_indices, Dataset, SplitIndices, Target, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::features::{feature_matrix, fit_normalizer, normalize, NormalizationParams};
use crate::models::{fit_prepared, EstimatorSpec, Task, TrainedModel};

/// Coefficient of determination `1 − Σ(y−ŷ)²/Σ(y−ȳ)²`.
pub fn r2_score(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual.len(), predicted.len())?;
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean) * (y - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::UndefinedMetric(
            "R² is undefined for a constant target".into(),
        ));
    }
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Mean absolute error.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_lengths(actual.len(), predicted.len())?;
    Ok(actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).abs())
        .sum::<f64>()
        / actual.len() as f64)
}

/// Fraction of exact label matches.
pub fn accuracy(actual: &[u8], predicted: &[u8]) -> Result<f64> {
    check_lengths(actual.len(), predicted.len())?;
    validate_labels(actual)?;
    validate_labels(predicted)?;
    let hits = actual.iter().zip(predicted).filter(|(a, p)| a == p).count();
    Ok(hits as f64 / actual.len() as f64)
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a == 0 {
        return Err(Error::EmptyInput("metric needs at least one pair"));
    }
    if a != b {
        return Err(Error::Shape(format!(
            "actual has {a} entries, predicted has {b}"
        )));
    }
    Ok(())
}

fn validate_labels(labels: &[u8]) -> Result<()> {
    if let Some(bad) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::Validation {
            field: "label",
            message: format!("labels must be 0 or 1, got {bad}"),
        });
    }
    Ok(())
}

/// One operating point of a ROC curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    pub threshold: f64,
}

/// ROC curve over the distinct scores (descending) plus a `+inf` sentinel,
/// so the curve always starts at (0,0) and ends at (1,1).
pub fn roc_curve(actual: &[u8], scores: &[f64]) -> Result<Vec<RocPoint>> {
    check_lengths(actual.len(), scores.len())?;
    validate_labels(actual)?;
    let positives = actual.iter().filter(|&&l| l == 1).count();
    let negatives = actual.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::UndefinedMetric(
            "ROC needs both classes present".into(),
        ));
    }
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    thresholds.insert(0, f64::INFINITY);

    let mut curve = Vec::with_capacity(thresholds.len());
    for t in thresholds {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for (&label, &score) in actual.iter().zip(scores) {
            if score >= t {
                if label == 1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        curve.push(RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
            threshold: t,
        });
    }
    Ok(curve)
}

/// Area under a ROC curve by the trapezoidal rule. Equals the Mann-Whitney
/// pair statistic with ties counted one half.
pub fn auc(curve: &[RocPoint]) -> Result<f64> {
    if curve.len() < 2 {
        return Err(Error::UndefinedMetric("AUC needs at least two ROC points".into()));
    }
    Ok(curve
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum())
}

/// 2×2 confusion counts `[[TN, FP], [FN, TP]]`: rows are ground truth,
/// columns are predictions, class 0 is the desirable clad.
pub fn confusion_matrix(actual: &[u8], predicted: &[u8]) -> Result<[[usize; 2]; 2]> {
    check_lengths(actual.len(), predicted.len())?;
    validate_labels(actual)?;
    validate_labels(predicted)?;
    let mut m = [[0usize; 2]; 2];
    for (&a, &p) in actual.iter().zip(predicted) {
        m[a as usize][p as usize] += 1;
    }
    Ok(m)
}

/// Per-fold scores of a cross-validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub k: usize,
}

impl CvResult {
    fn from_scores(scores: Vec<f64>) -> Self {
        let k = scores.len();
        let mean = scores.iter().sum::<f64>() / k as f64;
        let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / k as f64;
        CvResult {
            scores,
            mean,
            std: var.sqrt(),
            k,
        }
    }
}

/// Fold score functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvScoring {
    R2,
    Mse,
    Accuracy,
}

/// Default k for k-fold cross-validation.
pub const DEFAULT_K: usize = 5;

/// k-fold cross-validation scored by R² (regression) or accuracy
/// (classification).
pub fn cross_validate(
    spec: &EstimatorSpec,
    dataset: &Dataset,
    featureset: crate::features::FeatureSetKind,
    target: Target,
    k: usize,
    seed: u64,
) -> Result<CvResult> {
    let folds = k_fold_indices(dataset.len(), k, seed)?;
    let scoring = if target.is_classification() {
        CvScoring::Accuracy
    } else {
        CvScoring::R2
    };
    cross_validate_with(spec, dataset, featureset, target, &folds, scoring).map(|(cv, _)| cv)
}

/// Cross-validation against pre-built folds with an explicit scoring rule.
/// Also returns each fold's normalization parameters, which are fitted on
/// that fold's training rows only.
pub fn cross_validate_with(
    spec: &EstimatorSpec,
    dataset: &Dataset,
    featureset: crate::features::FeatureSetKind,
    target: Target,
    folds: &SplitIndices,
    scoring: CvScoring,
) -> Result<(CvResult, Vec<NormalizationParams>)> {
    check_task(spec, target)?;
    let matrix = feature_matrix(dataset, featureset)?;
    let y = dataset.target_vector(target);

    let mut scores = Vec::with_capacity(folds.folds.len());
    let mut normalizers = Vec::with_capacity(folds.folds.len());
    for fold in &folds.folds {
        let in_fold = |i: &usize| fold.binary_search(i).is_ok();
        let train_idx: Vec<usize> = (0..dataset.len()).filter(|i| !in_fold(i)).collect();

        let train_rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| matrix[i].clone()).collect();
        let train_y: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
        let test_rows: Vec<Vec<f64>> = fold.iter().map(|&i| matrix[i].clone()).collect();
        let test_y: Vec<f64> = fold.iter().map(|&i| y[i]).collect();

        let normalizer = fit_normalizer(&train_rows)?;
        let train_norm = normalize(&normalizer, &train_rows)?;
        let test_norm = normalize(&normalizer, &test_rows)?;
        let model = fit_prepared(
            spec,
            &train_norm,
            &train_y,
            normalizer.clone(),
            Some(featureset),
            Some(target.name().to_string()),
        )?;
        let pred = model.predict(&test_norm)?;
        let score = match scoring {
            CvScoring::R2 => r2_score(&test_y, &pred)?,
            CvScoring::Mse => {
                test_y
                    .iter()
                    .zip(&pred)
                    .map(|(a, p)| (a - p) * (a - p))
                    .sum::<f64>()
                    / test_y.len() as f64
            }
            CvScoring::Accuracy => {
                let a: Vec<u8> = test_y.iter().map(|&v| v as u8).collect();
                let p: Vec<u8> = pred.iter().map(|&v| v as u8).collect();
                accuracy(&a, &p)?
            }
        };
        scores.push(score);
        normalizers.push(normalizer);
    }
    Ok((CvResult::from_scores(scores), normalizers))
}

fn check_task(spec: &EstimatorSpec, target: Target) -> Result<()> {
    let want = if target.is_classification() {
        Task::Classification
    } else {
        Task::Regression
    };
    if spec.kind.task() != want {
        return Err(Error::Task(format!(
            "model `{}` is a {} estimator but target `{}` needs {}",
            spec.kind,
            spec.kind.task(),
            target.name(),
            want
        )));
    }
    Ok(())
}

/// Which split produced a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDescription {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub r2: f64,
    pub mae: f64,
}

/// Holdout evaluation of one regression model: metrics plus the per-point
/// parity pairs behind a predicted-vs-actual plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub schema_version: u32,
    pub task: String,
    pub model_kind: String,
    pub featureset: String,
    pub target: String,
    pub split: SplitDescription,
    pub metrics: RegressionMetrics,
    /// (actual, predicted) per test row.
    pub parity: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub auc: f64,
    /// AUC expressed as a percentage, carried alongside the raw value.
    pub auc_pct: f64,
}

/// Holdout evaluation of one classifier: accuracy/AUC, the ROC polyline and
/// the confusion counts `[[TN, FP], [FN, TP]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub task: String,
    pub model_kind: String,
    pub featureset: String,
    pub target: String,
    pub split: SplitDescription,
    pub metrics: ClassificationMetrics,
    /// (fpr, tpr, threshold) triples.
    pub roc: Vec<(f64, f64, f64)>,
    pub confusion: [[usize; 2]; 2],
}

/// Either report kind, as emitted by the benchmark command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Regression(RegressionReport),
    Classification(ClassificationReport),
}

/// Fits a model on the selected rows: featurize, fit the normalizer on those
/// rows only, normalize, fit.
pub fn fit_on_indices(
    spec: &EstimatorSpec,
    dataset: &Dataset,
    featureset: crate::features::FeatureSetKind,
    target: Target,
    indices: &[usize],
) -> Result<TrainedModel> {
    check_task(spec, target)?;
    let matrix = feature_matrix(dataset, featureset)?;
    let y = dataset.target_vector(target);
    let rows: Vec<Vec<f64>> = indices.iter().map(|&i| matrix[i].clone()).collect();
    let targets: Vec<f64> = indices.iter().map(|&i| y[i]).collect();
    let normalizer = fit_normalizer(&rows)?;
    let normed = normalize(&normalizer, &rows)?;
    fit_prepared(
        spec,
        &normed,
        &targets,
        normalizer,
        Some(featureset),
        Some(target.name().to_string()),
    )
}

/// Evaluates a fitted model on held-out rows and assembles the report.
pub fn evaluate_on_indices(
    model: &TrainedModel,
    dataset: &Dataset,
    target: Target,
    indices: &[usize],
    split: SplitDescription,
) -> Result<Report> {
    let featureset = model
        .fit_meta
        .feature_kind
        .ok_or_else(|| Error::Task("model artifact lacks a feature-set kind".into()))?;
    let matrix = feature_matrix(dataset, featureset)?;
    let y = dataset.target_vector(target);
    let rows: Vec<Vec<f64>> = indices.iter().map(|&i| matrix[i].clone()).collect();
    let actual: Vec<f64> = indices.iter().map(|&i| y[i]).collect();
    let normed = normalize(&model.normalizer, &rows)?;

    if model.task == Task::Classification {
        if !target.is_classification() {
            return Err(Error::Task(format!(
                "classifier evaluated against regression target `{}`",
                target.name()
            )));
        }
        let scores = model.predict_proba(&normed)?;
        let labels: Vec<u8> = actual.iter().map(|&v| v as u8).collect();
        let predicted: Vec<u8> = scores.iter().map(|&p| u8::from(p > 0.5)).collect();
        let curve = roc_curve(&labels, &scores)?;
        let auc_value = auc(&curve)?;
        Ok(Report::Classification(ClassificationReport {
            schema_version: SCHEMA_VERSION,
            task: "classification".into(),
            model_kind: model.spec.kind.name().into(),
            featureset: featureset.name().into(),
            target: target.name().into(),
            split,
            metrics: ClassificationMetrics {
                accuracy: accuracy(&labels, &predicted)?,
                auc: auc_value,
                auc_pct: 100.0 * auc_value,
            },
            roc: curve.iter().map(|p| (p.fpr, p.tpr, p.threshold)).collect(),
            confusion: confusion_matrix(&labels, &predicted)?,
        }))
    } else {
        if target.is_classification() {
            return Err(Error::Task(
                "regression model evaluated against the quality target".into(),
            ));
        }
        let predicted = model.predict(&normed)?;
        Ok(Report::Regression(RegressionReport {
            schema_version: SCHEMA_VERSION,
            task: "regression".into(),
            model_kind: model.spec.kind.name().into(),
            featureset: featureset.name().into(),
            target: target.name().into(),
            split,
            metrics: RegressionMetrics {
                r2: r2_score(&actual, &predicted)?,
                mae: mae(&actual, &predicted)?,
            },
            parity: actual.into_iter().zip(predicted).collect(),
        }))
    }
}
