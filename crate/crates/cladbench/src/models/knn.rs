//! k-nearest-neighbor regression and classification with brute-force search.
//!
//! Neighbors are ranked by (distance, training index), so equal distances
//! resolve to the lowest index. With inverse-distance weighting, an exact
//! match (distance zero) takes full weight: averaging is restricted to the
//! zero-distance neighbors. The `algorithm` and `leaf_size` hyperparameters
//! are stored as metadata; brute force is the reference search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{EstimatorKind, EstimatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KnnWeights {
    Uniform,
    Distance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub n_neighbors: usize,
    pub weights: KnnWeights,
    /// Minkowski power: 1 is manhattan, 2 is euclidean.
    pub minkowski_p: f64,
    pub leaf_size: i64,
    pub algorithm: String,
    pub classification: bool,
}

impl KnnParams {
    fn neighbors(&self, row: &[f64]) -> Vec<(f64, usize)> {
        let mut dists: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, train)| (minkowski(train, row, self.minkowski_p), i))
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dists.truncate(self.n_neighbors);
        dists
    }

    fn weighted_targets(&self, row: &[f64]) -> Vec<(f64, f64)> {
        let nearest = self.neighbors(row);
        match self.weights {
            KnnWeights::Uniform => nearest
                .into_iter()
                .map(|(_, i)| (1.0, self.y[i]))
                .collect(),
            KnnWeights::Distance => {
                if nearest.iter().any(|(d, _)| *d == 0.0) {
                    // exact matches take all the weight
                    nearest
                        .into_iter()
                        .filter(|(d, _)| *d == 0.0)
                        .map(|(_, i)| (1.0, self.y[i]))
                        .collect()
                } else {
                    nearest
                        .into_iter()
                        .map(|(d, i)| (1.0 / d, self.y[i]))
                        .collect()
                }
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        if self.classification {
            f64::from(u8::from(self.proba_row(row) > 0.5))
        } else {
            let pairs = self.weighted_targets(row);
            let total: f64 = pairs.iter().map(|(w, _)| w).sum();
            pairs.iter().map(|(w, t)| w * t).sum::<f64>() / total
        }
    }

    pub fn proba_row(&self, row: &[f64]) -> f64 {
        let pairs = self.weighted_targets(row);
        let total: f64 = pairs.iter().map(|(w, _)| w).sum();
        let class1: f64 = pairs
            .iter()
            .filter(|(_, t)| *t == 1.0)
            .map(|(w, _)| w)
            .sum();
        class1 / total
    }
}

fn minkowski(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    } else if p == 2.0 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    } else {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<KnnParams> {
    let classification = spec.kind == EstimatorKind::KnnClf;
    let n_neighbors = spec
        .params
        .int_or("n_neighbors", if classification { 15 } else { 10 }) as usize;
    if n_neighbors > x.len() {
        return Err(Error::Spec {
            kind: spec.kind.name().into(),
            name: "n_neighbors".into(),
            message: format!(
                "n_neighbors = {n_neighbors} exceeds the {} training rows",
                x.len()
            ),
        });
    }
    let weights = match spec.params.text_or("weights", "distance") {
        "uniform" => KnnWeights::Uniform,
        _ => KnnWeights::Distance,
    };
    let minkowski_p = match spec.params.text_or("metric", "minkowski") {
        "manhattan" => 1.0,
        // minkowski is sampled at power 2, same as euclidean
        _ => 2.0,
    };
    Ok(KnnParams {
        x: x.to_vec(),
        y: y.to_vec(),
        n_neighbors,
        weights,
        minkowski_p,
        leaf_size: spec.params.int_or("leaf_size", 30),
        algorithm: spec.params.text_or("algorithm", "brute").to_string(),
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::EstimatorSpec;

    fn grid() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| (i * 10) as f64).collect();
        (x, y)
    }

    #[test]
    fn k1_reproduces_training_point() {
        let (x, y) = grid();
        let spec = EstimatorSpec::new(EstimatorKind::KnnReg).with_int("n_neighbors", 1);
        let params = fit(&spec, &x, &y).unwrap();
        for (row, target) in x.iter().zip(&y) {
            assert_eq!(params.predict_row(row), *target);
        }
    }

    #[test]
    fn k_equals_n_uniform_is_global_mean() {
        let (x, y) = grid();
        let spec = EstimatorSpec::new(EstimatorKind::KnnReg)
            .with_int("n_neighbors", 8)
            .with_text("weights", "uniform");
        let params = fit(&spec, &x, &y).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        assert_eq!(params.predict_row(&[3.3]), mean);
    }

    #[test]
    fn tie_vote_goes_to_class_zero() {
        // query equidistant from a 0-labeled and a 1-labeled point, both
        // orderings of the training data
        for (ys, xs) in [
            (vec![0.0, 1.0], vec![vec![0.0], vec![2.0]]),
            (vec![1.0, 0.0], vec![vec![2.0], vec![0.0]]),
        ] {
            let spec = EstimatorSpec::new(EstimatorKind::KnnClf)
                .with_int("n_neighbors", 2)
                .with_text("weights", "uniform");
            let params = fit(&spec, &xs, &ys).unwrap();
            assert_eq!(params.proba_row(&[1.0]), 0.5);
            assert_eq!(params.predict_row(&[1.0]), 0.0);
        }
    }

    #[test]
    fn exact_match_takes_full_weight() {
        let x = vec![vec![0.0], vec![1.0], vec![5.0]];
        let y = vec![10.0, 20.0, 30.0];
        let spec = EstimatorSpec::new(EstimatorKind::KnnReg)
            .with_int("n_neighbors", 3)
            .with_text("weights", "distance");
        let params = fit(&spec, &x, &y).unwrap();
        assert_eq!(params.predict_row(&[1.0]), 20.0);
    }

    #[test]
    fn metrics_agree_on_euclidean_vs_minkowski() {
        let (x, y) = grid();
        let base = EstimatorSpec::new(EstimatorKind::KnnReg).with_int("n_neighbors", 3);
        let a = fit(&base.clone().with_text("metric", "euclidean"), &x, &y).unwrap();
        let b = fit(&base.with_text("metric", "minkowski"), &x, &y).unwrap();
        assert_eq!(a.predict_row(&[2.7]), b.predict_row(&[2.7]));
    }

    #[test]
    fn too_many_neighbors_rejected() {
        let (x, y) = grid();
        let spec = EstimatorSpec::new(EstimatorKind::KnnReg).with_int("n_neighbors", 9);
        assert!(matches!(fit(&spec, &x, &y), Err(Error::Spec { .. })));
    }
}
