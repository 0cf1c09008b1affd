//! AdaBoost: R2 for regression over depth-3 trees, SAMME for binary
//! classification over stumps.
//!
//! Base learners are fit with the current sample weights directly (weighted
//! impurities and leaf values), so boosting stays deterministic without
//! weighted resampling. Regression predicts the weighted median of the
//! learners; classification takes the weighted vote.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::tree::{grow_tree, TreeConfig, TreeParams};
use crate::models::{EstimatorKind, EstimatorSpec};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdaLoss {
    Linear,
    Square,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaParams {
    pub estimators: Vec<TreeParams>,
    /// `ln(1/β)` style estimator weights.
    pub estimator_weights: Vec<f64>,
    pub classification: bool,
}

impl AdaParams {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        if self.classification {
            f64::from(u8::from(self.proba_row(row) > 0.5))
        } else {
            self.weighted_median(row)
        }
    }

    /// Weighted vote fraction for class 1.
    pub fn proba_row(&self, row: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut class1 = 0.0;
        for (tree, &alpha) in self.estimators.iter().zip(&self.estimator_weights) {
            total += alpha;
            if tree.predict_row(row) == 1.0 {
                class1 += alpha;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            class1 / total
        }
    }

    fn weighted_median(&self, row: &[f64]) -> f64 {
        let mut pairs: Vec<(f64, f64)> = self
            .estimators
            .iter()
            .zip(&self.estimator_weights)
            .map(|(t, &a)| (t.predict_row(row), a))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let half = pairs.iter().map(|(_, a)| a).sum::<f64>() / 2.0;
        let mut acc = 0.0;
        for (pred, alpha) in &pairs {
            acc += alpha;
            if acc >= half {
                return *pred;
            }
        }
        pairs.last().map_or(0.0, |(p, _)| *p)
    }
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<AdaParams> {
    let classification = spec.kind == EstimatorKind::AdaClf;
    let n = x.len();
    let d = x[0].len();
    let n_estimators = spec.params.int_or("n_estimators", if classification { 577 } else { 50 })
        as usize;
    let learning_rate = spec
        .params
        .real_or("learning_rate", if classification { 0.02 } else { 1.0 });
    let loss = match spec.params.text_or("loss", "square") {
        "linear" => AdaLoss::Linear,
        "exponential" => AdaLoss::Exponential,
        _ => AdaLoss::Square,
    };
    // depth-1 stumps for classification, depth-3 trees for regression
    let config = TreeConfig {
        max_depth: if classification { 1 } else { 3 },
        ..TreeConfig::from_spec(spec, d, 3, 1)
    };
    let mut rng = substream(spec.seed, 0);

    let mut weights = vec![1.0 / n as f64; n];
    let mut params = AdaParams {
        estimators: Vec::new(),
        estimator_weights: Vec::new(),
        classification,
    };
    let all: Vec<usize> = (0..n).collect();

    for _ in 0..n_estimators {
        let tree = grow_tree(x, y, Some(&weights), &all, &config, &mut rng);
        let pred: Vec<f64> = x.iter().map(|r| tree.predict_row(r)).collect();

        if classification {
            let err: f64 = weights
                .iter()
                .zip(pred.iter().zip(y))
                .filter(|(_, (p, t))| p != t)
                .map(|(w, _)| w)
                .sum();
            if err <= 0.0 {
                // perfect learner dominates; keep it and stop
                params.estimators.push(tree);
                params.estimator_weights.push(1.0);
                break;
            }
            if err >= 0.5 {
                if params.estimators.is_empty() {
                    params.estimators.push(tree);
                    params.estimator_weights.push(1.0);
                }
                break;
            }
            let alpha = learning_rate * ((1.0 - err) / err).ln();
            for (w, (p, t)) in weights.iter_mut().zip(pred.iter().zip(y)) {
                if p != t {
                    *w *= alpha.exp();
                }
            }
            normalize(&mut weights);
            params.estimators.push(tree);
            params.estimator_weights.push(alpha);
        } else {
            let abs_err: Vec<f64> = pred.iter().zip(y).map(|(p, t)| (p - t).abs()).collect();
            let max_err = abs_err.iter().copied().fold(0.0f64, f64::max);
            if max_err == 0.0 {
                params.estimators.push(tree);
                params.estimator_weights.push(1.0);
                break;
            }
            let losses: Vec<f64> = abs_err
                .iter()
                .map(|&e| {
                    let r = e / max_err;
                    match loss {
                        AdaLoss::Linear => r,
                        AdaLoss::Square => r * r,
                        AdaLoss::Exponential => 1.0 - (-r).exp(),
                    }
                })
                .collect();
            let avg_loss: f64 = weights.iter().zip(&losses).map(|(w, l)| w * l).sum();
            if avg_loss >= 0.5 {
                if params.estimators.is_empty() {
                    params.estimators.push(tree);
                    params.estimator_weights.push(1.0);
                }
                break;
            }
            let beta = avg_loss / (1.0 - avg_loss);
            let alpha = learning_rate * (1.0 / beta).ln();
            for (w, l) in weights.iter_mut().zip(&losses) {
                *w *= beta.powf(learning_rate * (1.0 - l));
            }
            normalize(&mut weights);
            params.estimators.push(tree);
            params.estimator_weights.push(alpha);
        }
    }

    Ok(params)
}

fn normalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::EstimatorSpec;

    #[test]
    fn one_estimator_equals_its_base_learner() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..12).map(|i| (i as f64).powi(2)).collect();
        let spec = EstimatorSpec::new(EstimatorKind::AdaReg).with_int("n_estimators", 1);
        let params = fit(&spec, &x, &y).unwrap();
        assert_eq!(params.estimators.len(), 1);
        for row in &x {
            assert_eq!(
                params.predict_row(row),
                params.estimators[0].predict_row(row)
            );
        }
    }

    #[test]
    fn separable_threshold_data_reaches_perfect_accuracy() {
        // brute-force check: a single stump search must find the boundary
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..16).map(|i| f64::from(u8::from(i >= 8))).collect();
        let spec = EstimatorSpec::new(EstimatorKind::AdaClf).with_int("n_estimators", 10);
        let params = fit(&spec, &x, &y).unwrap();
        for (row, target) in x.iter().zip(&y) {
            assert_eq!(params.predict_row(row), *target);
        }
    }

    #[test]
    fn regression_losses_all_fit() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 4.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| (r[0]).sin() * 3.0).collect();
        for loss in ["linear", "square", "exponential"] {
            let spec = EstimatorSpec::new(EstimatorKind::AdaReg)
                .with_int("n_estimators", 8)
                .with_text("loss", loss);
            let params = fit(&spec, &x, &y).unwrap();
            assert!(!params.estimators.is_empty());
            // in-sample error should be modest for a smooth target
            let mse: f64 = x
                .iter()
                .zip(&y)
                .map(|(r, t)| (params.predict_row(r) - t).powi(2))
                .sum::<f64>()
                / y.len() as f64;
            assert!(mse < 0.5, "loss={loss}, mse={mse}");
        }
    }
}
