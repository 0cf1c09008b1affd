//! Gradient boosting over regression trees.
//!
//! Regression boosts squared loss: the initial prediction is `mean(y)` and
//! each stage fits a tree to the current residuals. Binary classification
//! boosts log-loss on the log-odds scale: the initial score is
//! `log(p̄/(1−p̄))` with the class frequency clamped away from 0 and 1, each
//! stage fits a tree to the gradient `y − p` and replaces leaf values with a
//! Newton step. `subsample < 1` draws a per-stage row sample without
//! replacement.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::tree::{grow_tree, TreeConfig, TreeParams};
use crate::models::{EstimatorKind, EstimatorSpec};
use crate::rng::substream;

const PROBA_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostingParams {
    pub initial: f64,
    pub learning_rate: f64,
    pub trees: Vec<TreeParams>,
    pub classification: bool,
}

impl BoostingParams {
    fn score_row(&self, row: &[f64]) -> f64 {
        self.initial
            + self.learning_rate
                * self
                    .trees
                    .iter()
                    .map(|t| t.predict_row(row))
                    .sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        if self.classification {
            f64::from(u8::from(self.proba_row(row) > 0.5))
        } else {
            self.score_row(row)
        }
    }

    pub fn proba_row(&self, row: &[f64]) -> f64 {
        sigmoid(self.score_row(row))
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<BoostingParams> {
    let classification = spec.kind == EstimatorKind::Gbc;
    let n = x.len();
    let d = x[0].len();
    let n_estimators = spec.params.int_or("n_estimators", if classification { 50 } else { 916 })
        as usize;
    let learning_rate = spec
        .params
        .real_or("learning_rate", if classification { 0.5 } else { 0.01 });
    let subsample = spec.params.real_or("subsample", 1.0);
    let depth_default = if classification { 2 } else { 100 };
    // Stages always fit regression trees, for classification too: the targets
    // are log-loss gradients, not labels.
    let config = TreeConfig {
        criterion: crate::models::tree::SplitCriterion::Variance,
        ..TreeConfig::from_spec(spec, d, depth_default, 1)
    };
    let mut rng = substream(spec.seed, 0);

    let nf = n as f64;
    if classification {
        let freq = (y.iter().sum::<f64>() / nf).clamp(PROBA_CLAMP, 1.0 - PROBA_CLAMP);
        let initial = (freq / (1.0 - freq)).ln();
        let mut params = BoostingParams {
            initial,
            learning_rate,
            trees: Vec::new(),
            classification,
        };
        // Single-class data: the clamped frequency is already the model.
        if y.iter().all(|&v| v == y[0]) {
            return Ok(params);
        }
        let mut score = vec![initial; n];
        for _ in 0..n_estimators {
            let grad: Vec<f64> = y
                .iter()
                .zip(&score)
                .map(|(&yi, &s)| yi - sigmoid(s))
                .collect();
            let rows = stage_rows(n, subsample, &mut rng);
            let mut tree = grow_tree(x, &grad, None, &rows, &config, &mut rng);
            newton_leaf_update(&mut tree, x, y, &score, &rows);
            for (s, row) in score.iter_mut().zip(x) {
                *s += learning_rate * tree.predict_row(row);
            }
            params.trees.push(tree);
        }
        Ok(params)
    } else {
        let initial = y.iter().sum::<f64>() / nf;
        let mut params = BoostingParams {
            initial,
            learning_rate,
            trees: Vec::new(),
            classification,
        };
        let mut score = vec![initial; n];
        for _ in 0..n_estimators {
            let residual: Vec<f64> = y.iter().zip(&score).map(|(&yi, &s)| yi - s).collect();
            let rows = stage_rows(n, subsample, &mut rng);
            let tree = grow_tree(x, &residual, None, &rows, &config, &mut rng);
            for (s, row) in score.iter_mut().zip(x) {
                *s += learning_rate * tree.predict_row(row);
            }
            params.trees.push(tree);
        }
        Ok(params)
    }
}

/// Rows used by one boosting stage: all of them, or a without-replacement
/// sample of `ceil(subsample·n)` (at least one).
fn stage_rows(n: usize, subsample: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if subsample >= 1.0 {
        return (0..n).collect();
    }
    use rand::seq::SliceRandom;
    let count = ((subsample * n as f64).round() as usize).clamp(1, n);
    let mut all: Vec<usize> = (0..n).collect();
    let (chosen, _) = all.partial_shuffle(rng, count);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    chosen
}

/// Replaces each leaf's gradient mean with the Newton step
/// `Σ(y−p) / Σ p(1−p)` over the stage rows that reach the leaf.
fn newton_leaf_update(
    tree: &mut TreeParams,
    x: &[Vec<f64>],
    y: &[f64],
    score: &[f64],
    rows: &[usize],
) {
    use crate::models::tree::TreeNode;
    let n_nodes = tree.nodes.len();
    let mut numer = vec![0.0; n_nodes];
    let mut denom = vec![0.0; n_nodes];
    for &i in rows {
        let mut idx = 0;
        while let TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } = &tree.nodes[idx]
        {
            idx = if x[i][*feature] <= *threshold {
                *left
            } else {
                *right
            };
        }
        let p = sigmoid(score[i]);
        numer[idx] += y[i] - p;
        denom[idx] += p * (1.0 - p);
    }
    for (idx, node) in tree.nodes.iter_mut().enumerate() {
        if let TreeNode::LeafValue(v) = node {
            *v = if denom[idx] > f64::EPSILON {
                numer[idx] / denom[idx]
            } else {
                0.0
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fit as fit_model, EstimatorSpec};

    #[test]
    fn one_stump_unit_rate_fits_two_points_exactly() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![0.0, 1.0];
        let spec = EstimatorSpec::new(EstimatorKind::Gbr)
            .with_int("n_estimators", 1)
            .with_real("learning_rate", 1.0)
            .with_int("max_depth", 1);
        let params = fit(&spec, &x, &y).unwrap();
        assert_eq!(params.predict_row(&[0.0]), 0.0);
        assert_eq!(params.predict_row(&[1.0]), 1.0);
    }

    #[test]
    fn zero_learning_rate_predicts_mean_exactly() {
        let x: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..9).map(|i| (i * i) as f64).collect();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let spec = EstimatorSpec::new(EstimatorKind::Gbr)
            .with_int("n_estimators", 20)
            .with_real("learning_rate", 0.0);
        let params = fit(&spec, &x, &y).unwrap();
        assert_eq!(params.predict_row(&[2.0]), mean);
        assert_eq!(params.predict_row(&[100.0]), mean);
    }

    #[test]
    fn single_class_probability_is_clamped_frequency() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let y = vec![1.0; 6];
        let spec = EstimatorSpec::new(EstimatorKind::Gbc).with_int("n_estimators", 10);
        let params = fit(&spec, &x, &y).unwrap();
        let expected = sigmoid(((1.0 - PROBA_CLAMP) / PROBA_CLAMP).ln());
        for row in &x {
            assert_eq!(params.proba_row(row), expected);
        }
        assert!(params.proba_row(&[0.0]) > 1.0 - 1e-9);
    }

    #[test]
    fn classifier_separates_threshold_data() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..20).map(|i| f64::from(u8::from(i >= 10))).collect();
        let spec = EstimatorSpec::new(EstimatorKind::Gbc)
            .with_int("n_estimators", 20)
            .with_real("learning_rate", 0.5)
            .with_int("max_depth", 2);
        let model = fit_model(&spec, &x, &y).unwrap();
        assert_eq!(model.predict(&x).unwrap(), y);
        for p in model.predict_proba(&x).unwrap() {
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn subsampled_fit_is_deterministic() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 5) as f64]).collect();
        let y: Vec<f64> = (0..30).map(|i| (i as f64).sqrt()).collect();
        let spec = EstimatorSpec::new(EstimatorKind::Gbr)
            .with_int("n_estimators", 15)
            .with_real("subsample", 0.5)
            .with_real("learning_rate", 0.3)
            .with_seed(11);
        let a = fit(&spec, &x, &y).unwrap();
        let b = fit(&spec, &x, &y).unwrap();
        assert_eq!(a, b);
    }
}
