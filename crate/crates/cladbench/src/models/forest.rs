//! Random forests: bagged CART trees with per-node feature sampling.
//!
//! Each tree draws its own bootstrap sample (n draws with replacement) from
//! an RNG substream derived from the spec seed and the tree index, so forests
//! can be grown in any order without changing the result. Regression
//! predicts the mean over trees; classification takes the majority vote with
//! the vote fraction as probability (ties go to class 0).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::tree::{grow_tree, TreeConfig, TreeParams};
use crate::models::{EstimatorKind, EstimatorSpec};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: Vec<TreeParams>,
    pub classification: bool,
}

impl ForestParams {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        if self.classification {
            f64::from(u8::from(self.proba_row(row) > 0.5))
        } else {
            let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
            sum / self.trees.len() as f64
        }
    }

    /// Fraction of trees voting class 1.
    pub fn proba_row(&self, row: &[f64]) -> f64 {
        let votes: usize = self
            .trees
            .iter()
            .filter(|t| t.predict_row(row) == 1.0)
            .count();
        votes as f64 / self.trees.len() as f64
    }
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<ForestParams> {
    let n = x.len();
    let d = x[0].len();
    let classification = spec.kind == EstimatorKind::RfClf;
    let n_estimators = spec
        .params
        .int_or("n_estimators", if classification { 894 } else { 1783 })
        as usize;
    let msl_default = if classification { 4 } else { 1 };
    let config = TreeConfig::from_spec(spec, d, 10, msl_default);
    let bootstrap = spec.params.text_or("bootstrap", "true") == "true";

    let mut trees = Vec::with_capacity(n_estimators);
    for t in 0..n_estimators {
        let mut rng = substream(spec.seed, t as u64);
        let indices: Vec<usize> = if bootstrap {
            let mut sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            sample.sort_unstable();
            sample
        } else {
            (0..n).collect()
        };
        trees.push(grow_tree(x, y, None, &indices, &config, &mut rng));
    }
    Ok(ForestParams {
        trees,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fit as fit_model, tree, EstimatorSpec};

    #[test]
    fn single_tree_without_bootstrap_reduces_to_decision_tree() {
        let x: Vec<Vec<f64>> = (0..25)
            .map(|i| vec![(i as f64 * 0.3).sin(), i as f64])
            .collect();
        let y: Vec<f64> = (0..25).map(|i| (i as f64 * 0.7).cos()).collect();
        let forest_spec = EstimatorSpec::new(EstimatorKind::RfReg)
            .with_int("n_estimators", 1)
            .with_text("bootstrap", "false")
            .with_text("max_features", "sqrt")
            .with_int("max_depth", 30)
            .with_seed(9);
        let dt_spec = EstimatorSpec::new(EstimatorKind::DtReg)
            .with_text("max_features", "sqrt")
            .with_int("max_depth", 30)
            .with_seed(9);
        let forest = fit(&forest_spec, &x, &y).unwrap();
        let single = tree::fit(&dt_spec, &x, &y).unwrap();
        for row in &x {
            assert_eq!(forest.predict_row(row), single.predict_row(row));
        }
    }

    #[test]
    fn constant_target_predicts_constant() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y = vec![4.25; 10];
        let spec = EstimatorSpec::new(EstimatorKind::RfReg)
            .with_int("n_estimators", 5)
            .with_int("max_depth", 1);
        let forest = fit(&spec, &x, &y).unwrap();
        assert_eq!(forest.predict_row(&[3.0]), 4.25);
    }

    #[test]
    fn vote_tie_goes_to_class_zero() {
        // One tree always votes 1, one always votes 0: vote count is tied in
        // either order, and the tie must resolve to class 0.
        let one = TreeParams {
            nodes: vec![crate::models::tree::TreeNode::LeafProb(1.0)],
        };
        let zero = TreeParams {
            nodes: vec![crate::models::tree::TreeNode::LeafProb(0.0)],
        };
        for trees in [vec![one.clone(), zero.clone()], vec![zero, one]] {
            let forest = ForestParams {
                trees,
                classification: true,
            };
            assert_eq!(forest.proba_row(&[0.5]), 0.5);
            assert_eq!(forest.predict_row(&[0.5]), 0.0);
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i % 7) as f64]).collect();
        let y: Vec<f64> = (0..30).map(|i| ((i * i) % 13) as f64).collect();
        let spec = EstimatorSpec::new(EstimatorKind::RfReg)
            .with_int("n_estimators", 7)
            .with_text("max_features", "sqrt")
            .with_seed(4);
        let a = fit_model(&spec, &x, &y).unwrap();
        let b = fit_model(&spec, &x, &y).unwrap();
        assert_eq!(
            serde_json::to_string(&a.params).unwrap(),
            serde_json::to_string(&b.params).unwrap()
        );
    }
}
