//! Fully connected feed-forward networks for regression and binary
//! classification.
//!
//! Hidden activations are identity/logistic/tanh/relu; the output is linear
//! for regression and logistic for classification. Training minimizes MSE or
//! log-loss plus an L2 penalty `alpha` with full-batch sgd or adam at a
//! constant learning rate, stopping after 5000 epochs or once the loss has
//! not improved by 1e-8 for 20 consecutive epochs. Weights initialize to
//! uniform(−s, s) with `s = sqrt(6/(fan_in+fan_out))` from the seeded stream.
//! The `lbfgs` optimizer option is accepted but substituted with adam; the
//! substitution is recorded in the fit notes.
//!
//! [`Network`] exposes the loss/gradient surface so gradients can be checked
//! against finite differences.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{EstimatorKind, EstimatorSpec};
use crate::rng::seeded;

pub const MAX_EPOCHS: usize = 5000;
pub const LOSS_TOLERANCE: f64 = 1e-8;
pub const PATIENCE: usize = 20;
const PROBA_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Logistic,
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Logistic => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Logistic => a * (1.0 - a),
            Activation::Tanh => 1.0 - a * a,
            Activation::Relu => f64::from(u8::from(a > 0.0)),
        }
    }
}

/// Parses `"128,64"` into layer widths; an empty string means no hidden
/// layers (a purely linear model, kept as a test hook).
pub fn parse_hidden_layers(text: &str) -> std::result::Result<Vec<usize>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut sizes = Vec::new();
    for part in text.split(',') {
        let width: usize = part
            .trim()
            .parse()
            .map_err(|e| format!("bad layer width `{part}`: {e}"))?;
        if width == 0 || width > 4096 {
            return Err(format!("layer width must be in 1..=4096, got {width}"));
        }
        sizes.push(width);
    }
    if sizes.len() > 16 {
        return Err(format!("too many hidden layers: {}", sizes.len()));
    }
    Ok(sizes)
}

/// Learned state of a fitted network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    /// Input width, hidden widths, output width (always 1).
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
    /// Per layer, row-major `out × in`.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub classification: bool,
}

impl MlpParams {
    /// Regression value or class-1 probability per row.
    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| self.forward_row(row)).collect()
    }

    fn forward_row(&self, row: &[f64]) -> f64 {
        let n_layers = self.layer_sizes.len() - 1;
        let mut a: Vec<f64> = row.to_vec();
        for l in 0..n_layers {
            let fan_in = self.layer_sizes[l];
            let fan_out = self.layer_sizes[l + 1];
            let w = &self.weights[l];
            let mut next = Vec::with_capacity(fan_out);
            for o in 0..fan_out {
                let mut z = self.biases[l][o];
                for (i, &ai) in a.iter().enumerate().take(fan_in) {
                    z += w[o * fan_in + i] * ai;
                }
                let out = if l + 1 == n_layers {
                    if self.classification {
                        1.0 / (1.0 + (-z).exp())
                    } else {
                        z
                    }
                } else {
                    self.activation.apply(z)
                };
                next.push(out);
            }
            a = next;
        }
        a[0]
    }
}

/// A network with its full training surface: forward pass, penalized loss,
/// and analytic gradients.
#[derive(Debug, Clone)]
pub struct Network {
    pub sizes: Vec<usize>,
    pub activation: Activation,
    pub classification: bool,
    pub weights: Vec<DMatrix<f64>>,
    pub biases: Vec<DVector<f64>>,
}

impl Network {
    /// Glorot-uniform initialization from the seeded stream; biases start at
    /// zero. Weight draws are row-major per layer.
    pub fn init(
        sizes: &[usize],
        activation: Activation,
        classification: bool,
        seed: u64,
    ) -> Network {
        let mut rng = seeded(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in sizes.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let draws: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.random_range(-s..=s))
                .collect();
            weights.push(DMatrix::from_row_slice(fan_out, fan_in, &draws));
            biases.push(DVector::zeros(fan_out));
        }
        Network {
            sizes: sizes.to_vec(),
            activation,
            classification,
            weights,
            biases,
        }
    }

    /// Activations of every layer for a batch, input included.
    fn forward(&self, x: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
        let n_layers = self.weights.len();
        let mut activations = vec![x.clone()];
        for l in 0..n_layers {
            let mut z = activations[l].clone() * self.weights[l].transpose();
            for mut row in z.row_iter_mut() {
                row += self.biases[l].transpose();
            }
            let last = l + 1 == n_layers;
            let a = z.map(|v| {
                if last {
                    if self.classification {
                        1.0 / (1.0 + (-v).exp())
                    } else {
                        v
                    }
                } else {
                    self.activation.apply(v)
                }
            });
            activations.push(a);
        }
        activations
    }

    /// Batch predictions (column vector of outputs).
    pub fn predict(&self, x: &DMatrix<f64>) -> DVector<f64> {
        let activations = self.forward(x);
        DVector::from_column_slice(activations.last().unwrap().column(0).as_slice())
    }

    /// Penalized loss: mean squared error `(1/2n)Σ(ŷ−y)²` or mean log-loss,
    /// plus `alpha/(2n)·Σ||W||²` over weights (biases unpenalized).
    pub fn loss(&self, x: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> f64 {
        let n = x.nrows() as f64;
        let out = self.predict(x);
        let data_loss = if self.classification {
            -y.iter()
                .zip(out.iter())
                .map(|(&t, &p)| {
                    let p = p.clamp(PROBA_CLAMP, 1.0 - PROBA_CLAMP);
                    t * p.ln() + (1.0 - t) * (1.0 - p).ln()
                })
                .sum::<f64>()
                / n
        } else {
            y.iter()
                .zip(out.iter())
                .map(|(&t, &p)| (p - t) * (p - t))
                .sum::<f64>()
                / (2.0 * n)
        };
        let penalty: f64 = self
            .weights
            .iter()
            .map(|w| w.iter().map(|v| v * v).sum::<f64>())
            .sum();
        data_loss + alpha * penalty / (2.0 * n)
    }

    /// Loss plus analytic gradients with respect to every weight and bias.
    pub fn loss_and_gradient(
        &self,
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        alpha: f64,
    ) -> (f64, Vec<DMatrix<f64>>, Vec<DVector<f64>>) {
        let n = x.nrows() as f64;
        let n_layers = self.weights.len();
        let activations = self.forward(x);
        let loss = {
            let out = activations.last().unwrap();
            let data_loss = if self.classification {
                -y.iter()
                    .zip(out.column(0).iter())
                    .map(|(&t, &p)| {
                        let p = p.clamp(PROBA_CLAMP, 1.0 - PROBA_CLAMP);
                        t * p.ln() + (1.0 - t) * (1.0 - p).ln()
                    })
                    .sum::<f64>()
                    / n
            } else {
                y.iter()
                    .zip(out.column(0).iter())
                    .map(|(&t, &p)| (p - t) * (p - t))
                    .sum::<f64>()
                    / (2.0 * n)
            };
            let penalty: f64 = self
                .weights
                .iter()
                .map(|w| w.iter().map(|v| v * v).sum::<f64>())
                .sum();
            data_loss + alpha * penalty / (2.0 * n)
        };

        // Output delta is (ŷ − y)/n for both losses: the linear/MSE and
        // logistic/log-loss pairings share the same canonical-link form.
        let mut delta = activations[n_layers].clone();
        for (i, &t) in y.iter().enumerate() {
            delta[(i, 0)] = (delta[(i, 0)] - t) / n;
        }

        let mut grad_w = vec![DMatrix::zeros(0, 0); n_layers];
        let mut grad_b = vec![DVector::zeros(0); n_layers];
        for l in (0..n_layers).rev() {
            grad_w[l] = delta.transpose() * &activations[l] + (alpha / n) * &self.weights[l];
            grad_b[l] = DVector::from_iterator(
                self.biases[l].len(),
                (0..delta.ncols()).map(|c| delta.column(c).sum()),
            );
            if l > 0 {
                let mut back = delta * &self.weights[l];
                let act = &activations[l];
                for r in 0..back.nrows() {
                    for c in 0..back.ncols() {
                        back[(r, c)] *= self.activation.derivative_from_output(act[(r, c)]);
                    }
                }
                delta = back;
            }
        }
        (loss, grad_w, grad_b)
    }

    /// Flattens all parameters (weights row-major per layer, then biases).
    pub fn flat_params(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for w in &self.weights {
            for r in 0..w.nrows() {
                for c in 0..w.ncols() {
                    flat.push(w[(r, c)]);
                }
            }
        }
        for b in &self.biases {
            flat.extend(b.iter());
        }
        flat
    }

    /// Inverse of [`Network::flat_params`].
    pub fn set_flat_params(&mut self, flat: &[f64]) {
        let mut pos = 0;
        for w in &mut self.weights {
            for r in 0..w.nrows() {
                for c in 0..w.ncols() {
                    w[(r, c)] = flat[pos];
                    pos += 1;
                }
            }
        }
        for b in &mut self.biases {
            for v in b.iter_mut() {
                *v = flat[pos];
                pos += 1;
            }
        }
        assert_eq!(pos, flat.len());
    }

    /// Gradient in the same flattened layout.
    pub fn flat_gradient(
        &self,
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        alpha: f64,
    ) -> (f64, Vec<f64>) {
        let (loss, gw, gb) = self.loss_and_gradient(x, y, alpha);
        let mut flat = Vec::new();
        for w in &gw {
            for r in 0..w.nrows() {
                for c in 0..w.ncols() {
                    flat.push(w[(r, c)]);
                }
            }
        }
        for b in &gb {
            flat.extend(b.iter());
        }
        (loss, flat)
    }
}

pub fn fit(
    spec: &EstimatorSpec,
    x: &[Vec<f64>],
    y: &[f64],
    notes: &mut Vec<String>,
) -> Result<MlpParams> {
    let classification = spec.kind == EstimatorKind::MlpClf;
    let default_hidden = if classification { "256,128,64,32" } else { "128,64" };
    let hidden = parse_hidden_layers(spec.params.text_or("hidden_layer_sizes", default_hidden))
        .map_err(|m| spec.spec_error("hidden_layer_sizes", m))?;
    let activation = match spec
        .params
        .text_or("activation", if classification { "identity" } else { "relu" })
    {
        "identity" => Activation::Identity,
        "logistic" => Activation::Logistic,
        "tanh" => Activation::Tanh,
        _ => Activation::Relu,
    };
    let optimizer_name = spec
        .params
        .text_or("optimizer", if classification { "sgd" } else { "lbfgs" });
    let optimizer = if optimizer_name == "lbfgs" {
        notes.push("optimizer lbfgs substituted with adam".to_string());
        "adam"
    } else {
        optimizer_name
    };
    let learning_rate = spec.params.real_or("learning_rate", 1e-3);
    let alpha = spec
        .params
        .real_or("alpha", if classification { 1e-3 } else { 1e-4 });

    let d = x[0].len();
    let mut sizes = vec![d];
    sizes.extend(hidden);
    sizes.push(1);

    let xm = DMatrix::from_fn(x.len(), d, |i, j| x[i][j]);
    let yv = DVector::from_column_slice(y);
    let mut net = Network::init(&sizes, activation, classification, spec.seed);

    let mut adam_m: Vec<f64> = Vec::new();
    let mut adam_v: Vec<f64> = Vec::new();
    let mut best = f64::INFINITY;
    let mut stale = 0usize;
    for epoch in 0..MAX_EPOCHS {
        let (loss, grad) = net.flat_gradient(&xm, &yv, alpha);
        if !loss.is_finite() {
            return Err(Error::Domain(format!(
                "mlp training diverged at epoch {epoch}; lower the learning rate"
            )));
        }
        if best - loss < LOSS_TOLERANCE {
            stale += 1;
            if stale >= PATIENCE {
                break;
            }
        } else {
            stale = 0;
        }
        best = best.min(loss);

        let mut params = net.flat_params();
        match optimizer {
            "sgd" => {
                for (p, g) in params.iter_mut().zip(&grad) {
                    *p -= learning_rate * g;
                }
            }
            _ => {
                // adam with standard moment coefficients
                if adam_m.is_empty() {
                    adam_m = vec![0.0; params.len()];
                    adam_v = vec![0.0; params.len()];
                }
                let (b1, b2, eps) = (0.9, 0.999, 1e-8);
                let t = (epoch + 1) as i32;
                for i in 0..params.len() {
                    adam_m[i] = b1 * adam_m[i] + (1.0 - b1) * grad[i];
                    adam_v[i] = b2 * adam_v[i] + (1.0 - b2) * grad[i] * grad[i];
                    let m_hat = adam_m[i] / (1.0 - b1.powi(t));
                    let v_hat = adam_v[i] / (1.0 - b2.powi(t));
                    params[i] -= learning_rate * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
        net.set_flat_params(&params);
    }

    Ok(MlpParams {
        layer_sizes: sizes,
        activation,
        weights: net
            .weights
            .iter()
            .map(|w| {
                let mut flat = Vec::with_capacity(w.len());
                for r in 0..w.nrows() {
                    for c in 0..w.ncols() {
                        flat.push(w[(r, c)]);
                    }
                }
                flat
            })
            .collect(),
        biases: net.biases.iter().map(|b| b.iter().copied().collect()).collect(),
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fit as fit_model, linear, EstimatorSpec};
    use approx::assert_relative_eq;

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = seeded(31);
        for trial in 0..5 {
            let d = 3;
            let n = 8;
            let sizes = vec![d, 5, 4, 1];
            let classification = trial % 2 == 0;
            let mut net = Network::init(&sizes, Activation::Tanh, classification, trial);
            let x = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
            let y = DVector::from_fn(n, |_, _| {
                if classification {
                    f64::from(u8::from(rng.random_range(0.0..1.0) > 0.5))
                } else {
                    rng.random_range(-2.0..2.0)
                }
            });
            let alpha = 0.01;
            let (_, analytic) = net.flat_gradient(&x, &y, alpha);
            let mut params = net.flat_params();
            let h = 1e-5;
            for i in 0..params.len() {
                let saved = params[i];
                params[i] = saved + h;
                net.set_flat_params(&params);
                let up = net.loss(&x, &y, alpha);
                params[i] = saved - h;
                net.set_flat_params(&params);
                let down = net.loss(&x, &y, alpha);
                params[i] = saved;
                net.set_flat_params(&params);
                let numeric = (up - down) / (2.0 * h);
                let denom = analytic[i].abs().max(numeric.abs()).max(1.0);
                assert!(
                    (analytic[i] - numeric).abs() / denom <= 1e-4,
                    "trial {trial} param {i}: analytic {} vs numeric {numeric}",
                    analytic[i]
                );
            }
        }
    }

    #[test]
    fn linear_reduction_converges_to_ols() {
        // no hidden layers, identity activation, MSE: the network is OLS;
        // a centered design keeps full-batch gradient descent well conditioned
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![(i as f64 - 7.5) / 4.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| 1.5 * r[0] - 0.25).collect();
        let spec = EstimatorSpec::new(EstimatorKind::MlpReg)
            .with_text("hidden_layer_sizes", "")
            .with_text("activation", "identity")
            .with_text("optimizer", "sgd")
            .with_real("learning_rate", 0.8)
            .with_real("alpha", 0.0)
            .with_seed(3);
        let mut notes = Vec::new();
        let params = fit(&spec, &x, &y, &mut notes).unwrap();
        let ols = linear::fit(&EstimatorSpec::new(EstimatorKind::Ols), &x, &y).unwrap();
        assert_relative_eq!(params.weights[0][0], ols.coefficients[0], epsilon = 1e-4);
        assert_relative_eq!(params.biases[0][0], ols.intercept, epsilon = 1e-4);
    }

    #[test]
    fn large_penalty_shrinks_weights() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 / 6.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| 3.0 * r[0] + 1.0).collect();
        let spec = EstimatorSpec::new(EstimatorKind::MlpReg)
            .with_text("hidden_layer_sizes", "4")
            .with_text("activation", "tanh")
            .with_text("optimizer", "adam")
            .with_real("learning_rate", 0.05)
            .with_real("alpha", 1e6)
            .with_seed(5);
        let mut notes = Vec::new();
        let params = fit(&spec, &x, &y, &mut notes).unwrap();
        let max_w = params
            .weights
            .iter()
            .flatten()
            .fold(0.0f64, |m, &w| m.max(w.abs()));
        assert!(max_w < 1e-2, "weights should shrink, max |w| = {max_w}");
        // prediction collapses toward the output bias
        let p = params.predict(&[vec![0.5], vec![1.5]]);
        assert_relative_eq!(p[0], p[1], epsilon = 1e-3);
    }

    #[test]
    fn lbfgs_is_substituted_and_noted() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0]).collect();
        let spec = EstimatorSpec::new(EstimatorKind::MlpReg)
            .with_text("hidden_layer_sizes", "4")
            .with_text("optimizer", "lbfgs");
        let model = fit_model(&spec, &x, &y).unwrap();
        assert!(model
            .fit_meta
            .notes
            .iter()
            .any(|n| n.contains("lbfgs substituted")));
    }

    #[test]
    fn classifier_learns_threshold() {
        let x: Vec<Vec<f64>> = (0..24).map(|i| vec![i as f64 / 12.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| f64::from(u8::from(r[0] > 1.0))).collect();
        let spec = EstimatorSpec::new(EstimatorKind::MlpClf)
            .with_text("hidden_layer_sizes", "8")
            .with_text("activation", "tanh")
            .with_text("optimizer", "adam")
            .with_real("learning_rate", 0.05)
            .with_real("alpha", 1e-4)
            .with_seed(7);
        let model = fit_model(&spec, &x, &y).unwrap();
        assert_eq!(model.predict(&x).unwrap(), y);
    }
}
