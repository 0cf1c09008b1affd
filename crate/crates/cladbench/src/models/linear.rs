//! Linear regressors: OLS, polynomial, ridge, and lasso.
//!
//! OLS and ridge are solved in closed form through the regularized normal
//! equations with an unpenalized intercept. The polynomial regressor expands
//! inputs to all monomials (with interactions) up to the configured degree
//! and then solves OLS. Lasso is solved by cyclic coordinate descent on
//! centered data, stopping at a duality gap of 1e-6.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{EstimatorKind, EstimatorSpec};

const LASSO_GAP_TOL: f64 = 1e-6;
const LASSO_MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// For polynomial fits: exponent multi-index of each expanded term.
    pub poly_terms: Option<Vec<Vec<u32>>>,
}

impl LinearParams {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match &self.poly_terms {
            None => {
                self.intercept
                    + row
                        .iter()
                        .zip(&self.coefficients)
                        .map(|(x, w)| x * w)
                        .sum::<f64>()
            }
            Some(terms) => {
                let expanded = expand_row(row, terms);
                self.intercept
                    + expanded
                        .iter()
                        .zip(&self.coefficients)
                        .map(|(x, w)| x * w)
                        .sum::<f64>()
            }
        }
    }
}

pub fn fit(spec: &EstimatorSpec, x: &[Vec<f64>], y: &[f64]) -> Result<LinearParams> {
    match spec.kind {
        EstimatorKind::Ols => solve_ridge(x, y, 0.0, None),
        EstimatorKind::Ridge => solve_ridge(x, y, spec.params.real_or("alpha", 0.012), None),
        EstimatorKind::Poly => {
            let degree = spec.params.int_or("degree", 4) as u32;
            let terms = monomial_terms(x[0].len(), degree);
            let expanded: Vec<Vec<f64>> = x.iter().map(|r| expand_row(r, &terms)).collect();
            solve_ridge(&expanded, y, 0.0, Some(terms))
        }
        EstimatorKind::Lasso => fit_lasso(x, y, spec.params.real_or("alpha", 0.0045)),
        other => Err(Error::Task(format!("{other} is not a linear estimator"))),
    }
}

/// Solves `min ||y - b - Xw||² + alpha ||w||²` exactly (intercept
/// unpenalized) through the normal equations. Falls back to a minimum-norm
/// SVD solve when the Gram matrix is singular.
fn solve_ridge(
    x: &[Vec<f64>],
    y: &[f64],
    alpha: f64,
    poly_terms: Option<Vec<Vec<u32>>>,
) -> Result<LinearParams> {
    let n = x.len();
    let d = x[0].len();
    let design = DMatrix::from_fn(n, d + 1, |i, j| if j == 0 { 1.0 } else { x[i][j - 1] });
    let yv = DVector::from_column_slice(y);

    let mut gram = design.transpose() * &design;
    for j in 1..=d {
        gram[(j, j)] += alpha;
    }
    let rhs = design.transpose() * &yv;

    let w = match gram.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => {
            let svd = design.svd(true, true);
            svd.solve(&yv, 1e-12)
                .map_err(|e| Error::Domain(format!("least-squares solve failed: {e}")))?
        }
    };

    Ok(LinearParams {
        intercept: w[0],
        coefficients: w.as_slice()[1..].to_vec(),
        poly_terms,
    })
}

/// Multi-indices of all monomials with total degree in `1..=degree`,
/// graded-lexicographic order.
pub fn monomial_terms(d: usize, degree: u32) -> Vec<Vec<u32>> {
    fn extend(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            if current.iter().sum::<u32>() > 0 {
                out.push(current.clone());
            }
            return;
        }
        for e in 0..=remaining {
            current[pos] = e;
            extend(current, pos + 1, remaining - e, out);
        }
        current[pos] = 0;
    }

    let mut out = Vec::new();
    for total in 1..=degree {
        let mut exact = Vec::new();
        extend(&mut vec![0; d], 0, total, &mut exact);
        // keep only terms whose total degree is exactly `total`
        exact.retain(|t| t.iter().sum::<u32>() == total);
        exact.sort();
        out.extend(exact);
    }
    out
}

fn expand_row(row: &[f64], terms: &[Vec<u32>]) -> Vec<f64> {
    terms
        .iter()
        .map(|term| {
            term.iter()
                .zip(row)
                .map(|(&e, &x)| x.powi(e as i32))
                .product()
        })
        .collect()
}

/// Cyclic coordinate descent for `min (1/2n)||y - b - Xw||² + alpha ||w||₁`
/// with an unpenalized intercept (handled by centering).
fn fit_lasso(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Result<LinearParams> {
    let n = x.len();
    let d = x[0].len();
    let nf = n as f64;

    let col_mean: Vec<f64> = (0..d)
        .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / nf)
        .collect();
    let y_mean = y.iter().sum::<f64>() / nf;

    // column-major centered copy
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|j| x.iter().map(|r| r[j] - col_mean[j]).collect())
        .collect();
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let col_sq: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
    let y_sq: f64 = yc.iter().map(|v| v * v).sum();

    let mut w = vec![0.0; d];
    let mut residual = yc.clone();

    if y_sq > 0.0 {
        let l1_reg = alpha * nf;
        let gap_tol = LASSO_GAP_TOL * y_sq;
        for _ in 0..LASSO_MAX_SWEEPS {
            for j in 0..d {
                if col_sq[j] == 0.0 {
                    continue;
                }
                let rho: f64 = cols[j]
                    .iter()
                    .zip(&residual)
                    .map(|(c, r)| c * r)
                    .sum::<f64>()
                    + col_sq[j] * w[j];
                let w_new = soft_threshold(rho, l1_reg) / col_sq[j];
                if w_new != w[j] {
                    let delta = w_new - w[j];
                    for (r, c) in residual.iter_mut().zip(&cols[j]) {
                        *r -= delta * c;
                    }
                    w[j] = w_new;
                }
            }
            if duality_gap(&cols, &yc, &residual, &w, l1_reg) <= gap_tol {
                break;
            }
        }
    }

    let intercept = y_mean - col_mean.iter().zip(&w).map(|(m, w)| m * w).sum::<f64>();
    Ok(LinearParams {
        intercept,
        coefficients: w,
        poly_terms: None,
    })
}

fn soft_threshold(z: f64, threshold: f64) -> f64 {
    if z > threshold {
        z - threshold
    } else if z < -threshold {
        z + threshold
    } else {
        0.0
    }
}

/// Duality gap of the unscaled objective `1/2||R||² + l1_reg ||w||₁`.
fn duality_gap(cols: &[Vec<f64>], yc: &[f64], residual: &[f64], w: &[f64], l1_reg: f64) -> f64 {
    let r_norm2: f64 = residual.iter().map(|v| v * v).sum();
    let dual_norm = cols
        .iter()
        .map(|c| {
            c.iter()
                .zip(residual)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                .abs()
        })
        .fold(0.0f64, f64::max);
    let (scale, mut gap) = if dual_norm > l1_reg {
        let s = l1_reg / dual_norm;
        (s, 0.5 * (r_norm2 + s * s * r_norm2))
    } else {
        (1.0, r_norm2)
    };
    let l1_norm: f64 = w.iter().map(|v| v.abs()).sum();
    let ry: f64 = residual.iter().zip(yc).map(|(a, b)| a * b).sum();
    gap += l1_reg * l1_norm - scale * ry;
    gap
}
