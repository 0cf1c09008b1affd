//! Gaussian naive Bayes for binary classification.
//!
//! Per-class, per-feature Gaussian likelihoods with empirical class priors.
//! Every variance gets `var_smoothing · max over features of the pooled
//! variance` added, and posteriors are combined in log space.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::EstimatorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbParams {
    /// log prior per class, `-inf` when a class is absent.
    pub log_prior: [f64; 2],
    pub mean: [Vec<f64>; 2],
    pub variance: [Vec<f64>; 2],
}

impl GnbParams {
    pub fn proba_row(&self, row: &[f64]) -> f64 {
        let mut log_post = [0.0f64; 2];
        for (class, post) in log_post.iter_mut().enumerate() {
            let mut lp = self.log_prior[class];
            if lp.is_finite() {
                for ((&x, &m), &v) in row
                    .iter()
                    .zip(&self.mean[class])
                    .zip(&self.variance[class])
                {
                    lp += -0.5 * (2.0 * std::f64::consts::PI * v).ln()
                        - (x - m) * (x - m) / (2.0 * v);
                }
            }
            *post = lp;
        }
        // softmax over two log posteriors
        let m = log_post[0].max(log_post[1]);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        let e0 = (log_post[0] - m).exp();
        let e1 = (log_post[1] - m).exp();
        e1 / (e0 + e1)
    }
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<GnbParams> {
    let var_smoothing = spec.params.real_or("var_smoothing", 4e-4);
    let n = x.len();
    let d = x[0].len();

    // pooled per-feature variance sets the smoothing scale
    let mut pooled_max = 0.0f64;
    for j in 0..d {
        let mean = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64;
        pooled_max = pooled_max.max(var);
    }
    let epsilon = var_smoothing * pooled_max;

    let mut mean = [vec![0.0; d], vec![0.0; d]];
    let mut variance = [vec![0.0; d], vec![0.0; d]];
    let mut log_prior = [f64::NEG_INFINITY; 2];
    for class in 0..2 {
        let rows: Vec<&Vec<f64>> = x
            .iter()
            .zip(y)
            .filter(|(_, &t)| t == class as f64)
            .map(|(r, _)| r)
            .collect();
        if rows.is_empty() {
            continue;
        }
        let m = rows.len() as f64;
        log_prior[class] = (m / n as f64).ln();
        for j in 0..d {
            let mu = rows.iter().map(|r| r[j]).sum::<f64>() / m;
            let var = rows.iter().map(|r| (r[j] - mu).powi(2)).sum::<f64>() / m;
            mean[class][j] = mu;
            variance[class][j] = var + epsilon;
        }
    }
    Ok(GnbParams {
        log_prior,
        mean,
        variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{EstimatorKind, EstimatorSpec};
    use approx::assert_relative_eq;

    fn spec() -> EstimatorSpec {
        EstimatorSpec::new(EstimatorKind::Gnb).with_real("var_smoothing", 1e-9)
    }

    #[test]
    fn mirrored_classes_are_even_at_origin() {
        let x = vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]];
        let y = vec![0.0, 0.0, 1.0, 1.0];
        let params = fit(&spec(), &x, &y).unwrap();
        assert_relative_eq!(params.proba_row(&[0.0]), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn query_at_class_mean_prefers_that_class() {
        let x = vec![vec![0.0], vec![0.2], vec![10.0], vec![10.2]];
        let y = vec![0.0, 0.0, 1.0, 1.0];
        let params = fit(&spec(), &x, &y).unwrap();
        assert!(params.proba_row(&[0.1]) < 0.5);
        assert!(params.proba_row(&[10.1]) > 0.5);
    }

    #[test]
    fn unit_variance_classes_hand_posterior() {
        // class 0 ~ N(0,1) from {-1, 1}, class 1 ~ N(2,1) from {1, 3}:
        // equal priors, query at 1 sits exactly between the means.
        let x = vec![vec![-1.0], vec![1.0], vec![1.0], vec![3.0]];
        let y = vec![0.0, 0.0, 1.0, 1.0];
        let params = fit(&spec(), &x, &y).unwrap();
        assert_relative_eq!(params.mean[0][0], 0.0);
        assert_relative_eq!(params.mean[1][0], 2.0);
        assert_relative_eq!(params.proba_row(&[1.0]), 0.5, epsilon = 1e-6);
    }

    #[test]
    fn single_class_training_data() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![1.0, 1.0];
        let params = fit(&spec(), &x, &y).unwrap();
        assert_eq!(params.proba_row(&[0.5]), 1.0);
    }
}
