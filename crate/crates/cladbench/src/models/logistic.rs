//! Binary logistic regression.
//!
//! Minimizes the summed log-loss plus `1/(2C)·||w||²` (L2) or `1/C·||w||₁`
//! (L1, via a proximal step); the intercept is never penalized. Optimization
//! is gradient descent with Armijo backtracking line search, stopping at an
//! optimality-residual norm of 1e-6 or after 10⁴ iterations.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::EstimatorSpec;

const GRAD_TOL: f64 = 1e-6;
const MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Penalty {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub penalty: Penalty,
    pub c: f64,
}

impl LogisticParams {
    pub fn proba_row(&self, row: &[f64]) -> f64 {
        let z = self.intercept
            + row
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| x * w)
                .sum::<f64>();
        1.0 / (1.0 + (-z).exp())
    }
}

/// `ln(1 + e^z)` without overflow.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Objective<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    l2: f64, // 1/C when penalty is L2, else 0
}

impl Objective<'_> {
    /// Smooth part: summed log-loss plus the L2 term.
    fn value(&self, w: &[f64], b: f64) -> f64 {
        let mut loss = 0.0;
        for (row, &t) in self.x.iter().zip(self.y) {
            let z = b + row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>();
            // -ln p(t|z) = ln(1+e^z) - t·z
            loss += log1p_exp(z) - t * z;
        }
        loss + 0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let d = w.len();
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        for (row, &t) in self.x.iter().zip(self.y) {
            let z = b + row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>();
            let p = 1.0 / (1.0 + (-z).exp());
            let diff = p - t;
            gb += diff;
            for (g, x) in gw.iter_mut().zip(row) {
                *g += diff * x;
            }
        }
        for (g, v) in gw.iter_mut().zip(w) {
            *g += self.l2 * v;
        }
        (gw, gb)
    }
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<LogisticParams> {
    let c = spec.params.real_or("c", 4.0);
    let penalty = match spec.params.text_or("penalty", "l2") {
        "l1" => Penalty::L1,
        _ => Penalty::L2,
    };
    let d = x[0].len();
    let l1_strength = if penalty == Penalty::L1 { 1.0 / c } else { 0.0 };
    let objective = Objective {
        x,
        y,
        l2: if penalty == Penalty::L2 { 1.0 / c } else { 0.0 },
    };

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut step: f64 = 1.0;
    for _ in 0..MAX_ITERS {
        let (gw, gb) = objective.gradient(&w, b);

        // Optimality residual: plain gradient for the smooth problem, the
        // subgradient violation for L1.
        let residual: f64 = if penalty == Penalty::L1 {
            let mut s = gb * gb;
            for (&wi, &gi) in w.iter().zip(&gw) {
                let r = if wi != 0.0 {
                    gi + wi.signum() * l1_strength
                } else {
                    (gi.abs() - l1_strength).max(0.0)
                };
                s += r * r;
            }
            s.sqrt()
        } else {
            (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt()
        };
        if residual <= GRAD_TOL {
            break;
        }

        let f0 = objective.value(&w, b);
        step = (step * 2.0).min(1e4);
        let mut accepted = false;
        for _ in 0..60 {
            let (w_new, b_new) = propose(&w, b, &gw, gb, step, l1_strength);
            let f_new = objective.value(&w_new, b_new);
            let ok = if penalty == Penalty::L1 {
                // quadratic majorization test for the proximal step
                let mut quad = f0;
                let mut dist2 = (b_new - b) * (b_new - b);
                quad += gb * (b_new - b);
                for ((wn, wo), g) in w_new.iter().zip(&w).zip(&gw) {
                    quad += g * (wn - wo);
                    dist2 += (wn - wo) * (wn - wo);
                }
                f_new <= quad + dist2 / (2.0 * step)
            } else {
                // Armijo sufficient decrease
                let g2: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
                f_new <= f0 - 1e-4 * step * g2
            };
            if ok {
                w = w_new;
                b = b_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // step collapsed; numerically at the optimum
        }
    }

    Ok(LogisticParams {
        weights: w,
        intercept: b,
        penalty,
        c,
    })
}

fn propose(
    w: &[f64],
    b: f64,
    gw: &[f64],
    gb: f64,
    step: f64,
    l1_strength: f64,
) -> (Vec<f64>, f64) {
    let b_new = b - step * gb;
    let w_new = w
        .iter()
        .zip(gw)
        .map(|(&wi, &gi)| {
            let v = wi - step * gi;
            if l1_strength > 0.0 {
                // soft threshold, intercept excluded
                let t = step * l1_strength;
                if v > t {
                    v - t
                } else if v < -t {
                    v + t
                } else {
                    0.0
                }
            } else {
                v
            }
        })
        .collect();
    (w_new, b_new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{EstimatorKind, EstimatorSpec};
    use approx::assert_relative_eq;

    #[test]
    fn balanced_zero_features_give_half_probability() {
        let x = vec![vec![0.0], vec![0.0], vec![0.0], vec![0.0]];
        let y = vec![0.0, 1.0, 0.0, 1.0];
        let spec = EstimatorSpec::new(EstimatorKind::LogReg);
        let params = fit(&spec, &x, &y).unwrap();
        assert_relative_eq!(params.intercept, 0.0, epsilon = 1e-9);
        assert_relative_eq!(params.proba_row(&[0.0]), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn separable_data_reaches_full_accuracy() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 - 9.5]).collect();
        let y: Vec<f64> = (0..20).map(|i| f64::from(u8::from(i >= 10))).collect();
        let spec = EstimatorSpec::new(EstimatorKind::LogReg).with_real("c", 4.0);
        let params = fit(&spec, &x, &y).unwrap();
        for (row, target) in x.iter().zip(&y) {
            let class = f64::from(u8::from(params.proba_row(row) > 0.5));
            assert_eq!(class, *target);
        }
    }

    #[test]
    fn decision_boundary_probability_is_half() {
        let params = LogisticParams {
            weights: vec![2.0, -1.0],
            intercept: 0.5,
            penalty: Penalty::L2,
            c: 1.0,
        };
        // pick x with w·x + b = 0: x = (1, 2.5) -> 2 - 2.5 + 0.5 = 0
        assert_eq!(params.proba_row(&[1.0, 2.5]), 0.5);
    }

    #[test]
    fn l1_penalty_sparsifies() {
        // second feature is pure noise; strong L1 should zero it
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![i as f64 - 19.5, if i % 2 == 0 { 0.3 } else { -0.3 }])
            .collect();
        let y: Vec<f64> = (0..40).map(|i| f64::from(u8::from(i >= 20))).collect();
        let spec = EstimatorSpec::new(EstimatorKind::LogReg)
            .with_text("penalty", "l1")
            .with_real("c", 0.05);
        let params = fit(&spec, &x, &y).unwrap();
        assert_eq!(params.weights[1], 0.0);
        assert!(params.weights[0] > 0.0);
    }
}
