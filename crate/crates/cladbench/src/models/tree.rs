//! CART decision trees for regression and binary classification.
//!
//! Split thresholds are midpoints of consecutive distinct sorted feature
//! values. The split criterion is variance reduction (regression) or
//! gini/entropy (classification); candidate features can be subsampled per
//! node. Zero-gain splits are allowed (required to separate XOR-like
//! targets), so growth stops only on purity, depth, or sample-count limits.
//! All tie-breaks go to the lowest feature index and lowest threshold.
//!
//! Trees optionally take per-sample weights; the boosting wrappers rely on
//! weighted impurities and weighted leaf values.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::{EstimatorKind, EstimatorSpec, Task};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitCriterion {
    Variance,
    Gini,
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Regression leaf: weighted mean target.
    LeafValue(f64),
    /// Classification leaf: weighted frequency of class 1.
    LeafProb(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub nodes: Vec<TreeNode>,
}

impl TreeParams {
    fn leaf(&self, row: &[f64]) -> &TreeNode {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    idx = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
                leaf => return leaf,
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self.leaf(row) {
            TreeNode::LeafValue(v) => *v,
            TreeNode::LeafProb(p) => f64::from(u8::from(*p > 0.5)),
            TreeNode::Split { .. } => unreachable!(),
        }
    }

    pub fn proba_row(&self, row: &[f64]) -> f64 {
        match self.leaf(row) {
            TreeNode::LeafProb(p) => *p,
            TreeNode::LeafValue(v) => *v,
            TreeNode::Split { .. } => unreachable!(),
        }
    }
}

/// Resolved growth limits for one tree.
#[derive(Debug, Clone)]
pub(crate) struct TreeConfig {
    pub criterion: SplitCriterion,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Number of candidate features sampled per node.
    pub max_features: usize,
}

impl TreeConfig {
    /// Reads the shared tree hyperparameters from a spec. `auto` means all
    /// features for regression and sqrt for classification.
    pub(crate) fn from_spec(
        spec: &EstimatorSpec,
        d: usize,
        default_max_depth: i64,
        default_min_samples_leaf: i64,
    ) -> Self {
        let task = spec.kind.task();
        let criterion = if task == Task::Regression {
            SplitCriterion::Variance
        } else {
            match spec.params.text_or("criterion", "gini") {
                "entropy" => SplitCriterion::Entropy,
                _ => SplitCriterion::Gini,
            }
        };
        let max_features = match spec.params.text_or("max_features", "auto") {
            "sqrt" => sqrt_features(d),
            "log2" => log2_features(d),
            "auto" => {
                if task == Task::Regression {
                    d
                } else {
                    sqrt_features(d)
                }
            }
            _ => d,
        };
        TreeConfig {
            criterion,
            max_depth: spec.params.int_or("max_depth", default_max_depth) as usize,
            min_samples_split: spec.params.int_or("min_samples_split", 2) as usize,
            min_samples_leaf: spec.params.int_or("min_samples_leaf", default_min_samples_leaf)
                as usize,
            max_features,
        }
    }
}

fn sqrt_features(d: usize) -> usize {
    ((d as f64).sqrt().floor() as usize).clamp(1, d)
}

fn log2_features(d: usize) -> usize {
    ((d as f64).log2().floor() as usize).clamp(1, d)
}

/// Fits a standalone decision tree. The node-level feature sampling stream
/// is substream 0 of the spec seed, shared with a single-tree forest.
pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<TreeParams> {
    let d = x[0].len();
    let (depth_default, msl_default) = if spec.kind == EstimatorKind::DtClf {
        (890, 4)
    } else {
        (60, 1)
    };
    let config = TreeConfig::from_spec(spec, d, depth_default, msl_default);
    let indices: Vec<usize> = (0..x.len()).collect();
    let mut rng = substream(spec.seed, 0);
    Ok(grow_tree(x, y, None, &indices, &config, &mut rng))
}

/// Grows one tree over the given row indices.
pub(crate) fn grow_tree(
    x: &[Vec<f64>],
    y: &[f64],
    weights: Option<&[f64]>,
    indices: &[usize],
    config: &TreeConfig,
    rng: &mut ChaCha8Rng,
) -> TreeParams {
    let mut nodes = Vec::new();
    grow_node(x, y, weights, indices, 0, config, rng, &mut nodes);
    TreeParams { nodes }
}

#[allow(clippy::too_many_arguments)]
fn grow_node(
    x: &[Vec<f64>],
    y: &[f64],
    weights: Option<&[f64]>,
    indices: &[usize],
    depth: usize,
    config: &TreeConfig,
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let w_of = |i: usize| weights.map_or(1.0, |w| w[i]);
    let pure = indices.windows(2).all(|p| y[p[0]] == y[p[1]]);
    let splittable =
        !pure && depth < config.max_depth && indices.len() >= config.min_samples_split;

    let split = if splittable {
        best_split(x, y, weights, indices, config, rng)
    } else {
        None
    };

    match split {
        Some((feature, threshold)) => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                indices.iter().partition(|&&i| x[i][feature] <= threshold);
            let node_pos = nodes.len();
            nodes.push(TreeNode::Split {
                feature,
                threshold,
                left: 0,
                right: 0,
            });
            let left = grow_node(x, y, weights, &left_idx, depth + 1, config, rng, nodes);
            let right = grow_node(x, y, weights, &right_idx, depth + 1, config, rng, nodes);
            if let TreeNode::Split {
                left: l, right: r, ..
            } = &mut nodes[node_pos]
            {
                *l = left;
                *r = right;
            }
            node_pos
        }
        None => {
            let total_w: f64 = indices.iter().map(|&i| w_of(i)).sum();
            let node = if config.criterion == SplitCriterion::Variance {
                let mean = indices.iter().map(|&i| w_of(i) * y[i]).sum::<f64>() / total_w;
                TreeNode::LeafValue(mean)
            } else {
                let w1: f64 = indices
                    .iter()
                    .filter(|&&i| y[i] == 1.0)
                    .map(|&i| w_of(i))
                    .sum();
                TreeNode::LeafProb(w1 / total_w)
            };
            nodes.push(node);
            nodes.len() - 1
        }
    }
}

/// Finds the (feature, threshold) with the lowest weighted child impurity.
/// Ties keep the first candidate: features ascending, thresholds ascending.
fn best_split(
    x: &[Vec<f64>],
    y: &[f64],
    weights: Option<&[f64]>,
    indices: &[usize],
    config: &TreeConfig,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, f64)> {
    let d = x[0].len();
    let features = sample_features(d, config.max_features, rng);
    let w_of = |i: usize| weights.map_or(1.0, |w| w[i]);

    let mut best: Option<(f64, usize, f64)> = None;
    let mut sorted: Vec<usize> = indices.to_vec();
    for &feature in &features {
        sorted.sort_by(|&a, &b| {
            x[a][feature]
                .total_cmp(&x[b][feature])
                .then(a.cmp(&b))
        });

        // suffix totals
        let m = sorted.len();
        let total_w: f64 = sorted.iter().map(|&i| w_of(i)).sum();
        let (total_wy, total_wyy, total_w1) = accumulate(y, weights, &sorted);

        let mut left_w = 0.0;
        let mut left_wy = 0.0;
        let mut left_wyy = 0.0;
        let mut left_w1 = 0.0;
        for pos in 1..m {
            let i = sorted[pos - 1];
            let w = w_of(i);
            left_w += w;
            left_wy += w * y[i];
            left_wyy += w * y[i] * y[i];
            if y[i] == 1.0 {
                left_w1 += w;
            }
            let prev = x[sorted[pos - 1]][feature];
            let next = x[sorted[pos]][feature];
            if next <= prev {
                continue;
            }
            if pos < config.min_samples_leaf || m - pos < config.min_samples_leaf {
                continue;
            }
            let right_w = total_w - left_w;
            let score = match config.criterion {
                SplitCriterion::Variance => {
                    let sse_l = left_wyy - left_wy * left_wy / left_w;
                    let right_wy = total_wy - left_wy;
                    let sse_r = (total_wyy - left_wyy) - right_wy * right_wy / right_w;
                    sse_l + sse_r
                }
                SplitCriterion::Gini => {
                    gini_part(left_w1, left_w) + gini_part(total_w1 - left_w1, right_w)
                }
                SplitCriterion::Entropy => {
                    entropy_part(left_w1, left_w) + entropy_part(total_w1 - left_w1, right_w)
                }
            };
            let threshold = prev + (next - prev) / 2.0;
            if best.as_ref().is_none_or(|(b, _, _)| score < *b) {
                best = Some((score, feature, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

fn accumulate(y: &[f64], weights: Option<&[f64]>, indices: &[usize]) -> (f64, f64, f64) {
    let w_of = |i: usize| weights.map_or(1.0, |w| w[i]);
    let mut wy = 0.0;
    let mut wyy = 0.0;
    let mut w1 = 0.0;
    for &i in indices {
        let w = w_of(i);
        wy += w * y[i];
        wyy += w * y[i] * y[i];
        if y[i] == 1.0 {
            w1 += w;
        }
    }
    (wy, wyy, w1)
}

/// Weighted gini contribution `W·(1 − p₀² − p₁²)` of one child.
fn gini_part(w1: f64, w_total: f64) -> f64 {
    if w_total <= 0.0 {
        return 0.0;
    }
    let p1 = w1 / w_total;
    let p0 = 1.0 - p1;
    w_total * (1.0 - p0 * p0 - p1 * p1)
}

/// Weighted entropy contribution `W·H(p)` of one child, log base 2.
fn entropy_part(w1: f64, w_total: f64) -> f64 {
    if w_total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for p in [w1 / w_total, 1.0 - w1 / w_total] {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    w_total * h
}

/// Samples `count` distinct feature indices, returned ascending.
fn sample_features(d: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if count >= d {
        return (0..d).collect();
    }
    use rand::seq::SliceRandom;
    let mut all: Vec<usize> = (0..d).collect();
    let (chosen, _) = all.partial_shuffle(rng, count);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fit as fit_model, EstimatorSpec};

    fn dt_reg() -> EstimatorSpec {
        EstimatorSpec::new(EstimatorKind::DtReg).with_int("max_depth", 1_000_000)
    }

    #[test]
    fn pure_node_is_leaf() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let y = vec![5.0, 5.0, 5.0];
        let params = fit(&dt_reg(), &x, &y).unwrap();
        assert_eq!(params.nodes.len(), 1);
        assert_eq!(params.predict_row(&[9.0]), 5.0);
    }

    #[test]
    fn xor_is_separable_at_depth_two() {
        let x = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ];
        let y = vec![0.0, 1.0, 1.0, 0.0];
        let spec = EstimatorSpec::new(EstimatorKind::DtClf)
            .with_int("max_depth", 2)
            .with_text("max_features", "auto")
            .with_int("min_samples_leaf", 1);
        // classification `auto` is sqrt; force all features for this check
        let config = TreeConfig {
            criterion: SplitCriterion::Gini,
            max_depth: 2,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: 2,
        };
        let _ = spec;
        let mut rng = substream(0, 0);
        let params = grow_tree(&x, &y, None, &[0, 1, 2, 3], &config, &mut rng);
        for (row, target) in x.iter().zip(&y) {
            assert_eq!(params.predict_row(row), *target);
        }
    }

    #[test]
    fn single_sample_fit_is_constant() {
        let params = fit(&dt_reg(), &[vec![1.0]], &[3.5]).unwrap();
        assert_eq!(params.predict_row(&[0.0]), 3.5);
        assert_eq!(params.predict_row(&[100.0]), 3.5);
    }

    #[test]
    fn zero_training_error_on_distinct_rows() {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.73).cos()])
            .collect();
        let y: Vec<f64> = (0..40).map(|i| (i as f64 * 1.1).sin()).collect();
        let model = fit_model(&dt_reg(), &x, &y).unwrap();
        let pred = model.predict(&x).unwrap();
        for (p, t) in pred.iter().zip(&y) {
            assert_eq!(p, t);
        }
    }

    #[test]
    fn respects_max_depth() {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let spec = EstimatorSpec::new(EstimatorKind::DtReg).with_int("max_depth", 1);
        let params = fit(&spec, &x, &y).unwrap();
        // a stump has exactly one split and two leaves
        assert_eq!(params.nodes.len(), 3);
    }

    #[test]
    fn classification_leaf_probabilities() {
        let x = vec![vec![0.0], vec![0.1], vec![1.0], vec![1.1], vec![1.2]];
        let y = vec![0.0, 0.0, 1.0, 1.0, 0.0];
        let spec = EstimatorSpec::new(EstimatorKind::DtClf)
            .with_int("max_depth", 1)
            .with_int("min_samples_leaf", 1)
            .with_text("max_features", "auto");
        let params = fit(&spec, &x, &y).unwrap();
        let p = params.proba_row(&[1.05]);
        assert!((0.0..=1.0).contains(&p));
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
    }
}
