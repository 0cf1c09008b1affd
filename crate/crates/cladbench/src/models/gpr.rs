//! Gaussian process regression with composable kernels.
//!
//! Kernels are sums/products of constant, RBF, Matern (ν ∈ {0.5, 1.5, 2.5})
//! and white-noise terms, written e.g. `const(1)*rbf(1)+white(1)`. Targets
//! are centered; the posterior mean and variance come from a Cholesky
//! factorization of `K + αI`, retried once with jitter `1e-10·trace/n` before
//! giving up. White noise contributes only to the diagonal of the training
//! covariance and to the self-covariance of a query point.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::EstimatorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Constant(f64),
    Rbf { length_scale: f64 },
    Matern { length_scale: f64, nu: f64 },
    White { noise_level: f64 },
    Sum(Box<Kernel>, Box<Kernel>),
    Product(Box<Kernel>, Box<Kernel>),
}

impl Kernel {
    /// Covariance between two points; `same_point` marks the identical-point
    /// case where white noise applies.
    fn eval(&self, a: &[f64], b: &[f64], same_point: bool) -> f64 {
        match self {
            Kernel::Constant(c) => *c,
            Kernel::Rbf { length_scale } => {
                let r2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-r2 / (2.0 * length_scale * length_scale)).exp()
            }
            Kernel::Matern { length_scale, nu } => {
                let r = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                let s = r / length_scale;
                if *nu == 0.5 {
                    (-s).exp()
                } else if *nu == 1.5 {
                    let t = 3.0_f64.sqrt() * s;
                    (1.0 + t) * (-t).exp()
                } else {
                    // nu = 2.5
                    let t = 5.0_f64.sqrt() * s;
                    (1.0 + t + t * t / 3.0) * (-t).exp()
                }
            }
            Kernel::White { noise_level } => {
                if same_point {
                    *noise_level
                } else {
                    0.0
                }
            }
            Kernel::Sum(l, r) => l.eval(a, b, same_point) + r.eval(a, b, same_point),
            Kernel::Product(l, r) => l.eval(a, b, same_point) * r.eval(a, b, same_point),
        }
    }
}

/// Parses a kernel expression: sums of products of
/// `const(c) | rbf(l) | matern(l,nu) | white(n)`.
pub fn parse_kernel(text: &str) -> std::result::Result<Kernel, String> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err("empty kernel expression".into());
    }
    let mut terms = Vec::new();
    for term in cleaned.split('+') {
        let mut factors = Vec::new();
        for factor in term.split('*') {
            factors.push(parse_factor(factor)?);
        }
        let product = factors
            .into_iter()
            .reduce(|acc, k| Kernel::Product(Box::new(acc), Box::new(k)))
            .ok_or_else(|| "empty kernel term".to_string())?;
        terms.push(product);
    }
    terms
        .into_iter()
        .reduce(|acc, k| Kernel::Sum(Box::new(acc), Box::new(k)))
        .ok_or_else(|| "empty kernel expression".to_string())
}

fn parse_factor(text: &str) -> std::result::Result<Kernel, String> {
    let open = text
        .find('(')
        .ok_or_else(|| format!("expected `name(args)`, got `{text}`"))?;
    if !text.ends_with(')') {
        return Err(format!("unterminated kernel factor `{text}`"));
    }
    let name = &text[..open];
    let args: Vec<f64> = text[open + 1..text.len() - 1]
        .split(',')
        .map(|a| a.parse::<f64>().map_err(|e| format!("bad argument `{a}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let positive = |v: f64, what: &str| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(format!("{what} must be > 0, got {v}"))
        }
    };
    match (name, args.as_slice()) {
        ("const", [c]) => Ok(Kernel::Constant(positive(*c, "constant value")?)),
        ("rbf", [l]) => Ok(Kernel::Rbf {
            length_scale: positive(*l, "length scale")?,
        }),
        ("matern", [l, nu]) => {
            if ![0.5, 1.5, 2.5].contains(nu) {
                return Err(format!("matern nu must be one of 0.5, 1.5, 2.5, got {nu}"));
            }
            Ok(Kernel::Matern {
                length_scale: positive(*l, "length scale")?,
                nu: *nu,
            })
        }
        ("white", [n]) => Ok(Kernel::White {
            noise_level: positive(*n, "noise level")?,
        }),
        _ => Err(format!("unknown kernel factor `{text}`")),
    }
}

pub const DEFAULT_KERNEL: &str = "const(1)*rbf(1)+white(1)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GprParams {
    pub kernel: Kernel,
    pub alpha: f64,
    pub x_train: Vec<Vec<f64>>,
    pub y_mean: f64,
    /// `(K + αI)⁻¹ (y − ȳ)`
    pub coefficients: Vec<f64>,
    /// Lower Cholesky factor of `K + αI`, row-major lower triangle.
    pub chol_lower: Vec<Vec<f64>>,
}

impl GprParams {
    /// Posterior mean and variance at one point.
    pub fn posterior_row(&self, row: &[f64]) -> (f64, f64) {
        let k_vec: Vec<f64> = self
            .x_train
            .iter()
            .map(|xi| self.kernel.eval(xi, row, false))
            .collect();
        let mean = self.y_mean
            + k_vec
                .iter()
                .zip(&self.coefficients)
                .map(|(k, c)| k * c)
                .sum::<f64>();
        // var = k(x,x) − vᵀv with L v = k
        let v = forward_substitute(&self.chol_lower, &k_vec);
        let k_self = self.kernel.eval(row, row, true);
        let var = (k_self - v.iter().map(|x| x * x).sum::<f64>()).max(0.0);
        (mean, var)
    }
}

fn forward_substitute(lower: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut v = vec![0.0; n];
    for i in 0..n {
        let mut s = rhs[i];
        for j in 0..i {
            s -= lower[i][j] * v[j];
        }
        v[i] = s / lower[i][i];
    }
    v
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<GprParams> {
    let kernel = parse_kernel(spec.params.text_or("kernel", DEFAULT_KERNEL))
        .map_err(|m| spec.spec_error("kernel", m))?;
    let alpha = spec.params.real_or("alpha", 1e-2);
    let n = x.len();

    let y_mean = y.iter().sum::<f64>() / n as f64;
    let centered = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));

    let base = DMatrix::from_fn(n, n, |i, j| kernel.eval(&x[i], &x[j], i == j));
    let mut m = base.clone();
    for i in 0..n {
        m[(i, i)] += alpha;
    }

    let chol = match m.clone().cholesky() {
        Some(c) => c,
        None => {
            let jitter = 1e-10 * m.trace() / n as f64;
            for i in 0..n {
                m[(i, i)] += jitter;
            }
            m.clone().cholesky().ok_or_else(|| {
                Error::Domain(
                    "kernel matrix is not positive definite even with jitter".into(),
                )
            })?
        }
    };

    let coefficients = chol.solve(&centered);
    let l = chol.l();
    let chol_lower: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..=i).map(|j| l[(i, j)]).collect())
        .collect();

    Ok(GprParams {
        kernel,
        alpha,
        x_train: x.to_vec(),
        y_mean,
        coefficients: coefficients.iter().copied().collect(),
        chol_lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{EstimatorKind, EstimatorSpec};
    use approx::assert_relative_eq;

    fn wavy() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.5]).collect();
        let y: Vec<f64> = x.iter().map(|r| (r[0]).sin() + 2.0).collect();
        (x, y)
    }

    #[test]
    fn noise_free_kernel_interpolates() {
        let (x, y) = wavy();
        let spec = EstimatorSpec::new(EstimatorKind::Gpr)
            .with_text("kernel", "rbf(1)")
            .with_real("alpha", 1e-10);
        let params = fit(&spec, &x, &y).unwrap();
        for (row, target) in x.iter().zip(&y) {
            let (mean, var) = params.posterior_row(row);
            assert_relative_eq!(mean, target, epsilon = 1e-6);
            assert!(var <= 1e-6, "variance at a training point: {var}");
        }
    }

    #[test]
    fn far_query_reverts_to_prior() {
        let (x, y) = wavy();
        let spec = EstimatorSpec::new(EstimatorKind::Gpr)
            .with_text("kernel", "rbf(1)")
            .with_real("alpha", 1e-8);
        let params = fit(&spec, &x, &y).unwrap();
        let (mean, var) = params.posterior_row(&[1e4]);
        let y_mean = y.iter().sum::<f64>() / y.len() as f64;
        assert_relative_eq!(mean, y_mean, epsilon = 1e-9);
        assert_relative_eq!(var, 1.0, epsilon = 1e-9); // rbf prior variance
    }

    #[test]
    fn composite_kernel_parses_like_the_default() {
        let k = parse_kernel(DEFAULT_KERNEL).unwrap();
        match k {
            Kernel::Sum(prod, white) => {
                assert!(matches!(*prod, Kernel::Product(_, _)));
                assert!(matches!(*white, Kernel::White { .. }));
            }
            other => panic!("unexpected shape: {other:?}"),
        }
    }

    #[test]
    fn matern_family_evaluates() {
        for nu in [0.5, 1.5, 2.5] {
            let k = Kernel::Matern {
                length_scale: 1.0,
                nu,
            };
            assert_relative_eq!(k.eval(&[0.0], &[0.0], true), 1.0);
            let far = k.eval(&[0.0], &[10.0], false);
            assert!(far > 0.0 && far < 1e-3);
        }
    }

    #[test]
    fn bad_kernel_strings_rejected() {
        assert!(parse_kernel("").is_err());
        assert!(parse_kernel("rbf").is_err());
        assert!(parse_kernel("rbf(0)").is_err());
        assert!(parse_kernel("matern(1,0.7)").is_err());
        assert!(parse_kernel("spline(1)").is_err());
    }

    #[test]
    fn white_only_on_diagonal() {
        let k = parse_kernel("rbf(1)+white(0.5)").unwrap();
        assert_relative_eq!(k.eval(&[1.0], &[1.0], true), 1.5);
        // distinct points with equal coordinates get no noise term
        assert_relative_eq!(k.eval(&[1.0], &[1.0], false), 1.0);
    }
}
