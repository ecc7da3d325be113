use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSvmConfig {
    pub max_sweeps: usize,
    pub tol: f64,
}

impl Default for LinearSvmConfig {
    fn default() -> Self {
        Self {
            max_sweeps: 1000,
            tol: 1e-6,
        }
    }
}

/// Hinge-loss linear SVM. The bias is handled as an extra constant feature,
/// so it is regularized along with `w`: the primal is
/// `½(‖w‖² + b²) + Σ C_i·max(0, 1 − y_i(w·x_i + b))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSvmModel {
    pub w: Vec<f64>,
    pub b: f64,
    /// Dual variables, `0 <= alpha_i <= C_i`.
    pub alpha: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    /// Primal objective after every sweep.
    pub primal_trace: Vec<f64>,
}

impl LinearSvmModel {
    pub fn decision(&self, q: &[f64]) -> f64 {
        math::dot(&self.w, q) + self.b
    }

    pub fn decision_function(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|q| self.decision(q)).collect()
    }

    pub fn primal(&self, x: &Matrix, y: &[f64], c: &[f64]) -> f64 {
        primal_objective(&self.w, self.b, x, y, c)
    }
}

pub fn primal_objective(w: &[f64], b: f64, x: &Matrix, y: &[f64], c: &[f64]) -> f64 {
    let reg = 0.5 * (math::dot(w, w) + b * b);
    let loss: f64 = x
        .row_iter()
        .zip(y)
        .zip(c)
        .map(|((r, &yi), &ci)| ci * (1.0 - yi * (math::dot(w, r) + b)).max(0.0))
        .sum();
    reg + loss
}

/// Dual coordinate descent, visiting samples in index order each sweep.
/// Stops once the largest projected-gradient violation seen in a sweep
/// drops below `tol`; hitting `max_sweeps` returns with `converged = false`.
pub fn linear_svm_fit(x: &Matrix, y: &[f64], c: &[f64], cfg: LinearSvmConfig) -> Result<LinearSvmModel> {
    let n = x.rows();
    let d = x.cols();
    if y.len() != n || c.len() != n {
        return Err(Error::dims("svm labels/costs", n, y.len().min(c.len())));
    }
    if !y.iter().any(|&v| v > 0.0) || !y.iter().any(|&v| v < 0.0) {
        return Err(Error::DegenerateLabels("linear SVM needs both labels present".into()));
    }
    if c.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid("C", "costs must be finite and >= 0"));
    }
    let q_diag: Vec<f64> = x.row_iter().map(|r| math::dot(r, r) + 1.0).collect();
    let mut w = alloc::vec![0.0; d];
    let mut b = 0.0;
    let mut alpha = alloc::vec![0.0; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let mut max_violation: f64 = 0.0;
        for i in 0..n {
            if c[i] == 0.0 {
                continue;
            }
            let r = x.row(i);
            let g = y[i] * (math::dot(&w, r) + b) - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] >= c[i] {
                g.max(0.0)
            } else {
                g
            };
            max_violation = max_violation.max(pg.abs());
            if pg != 0.0 {
                let old = alpha[i];
                let new = (old - g / q_diag[i]).max(0.0).min(c[i]);
                let step = (new - old) * y[i];
                if step != 0.0 {
                    for (wj, xj) in w.iter_mut().zip(r) {
                        *wj += step * xj;
                    }
                    b += step;
                }
                alpha[i] = new;
            }
        }
        trace.push(primal_objective(&w, b, x, y, c));
        if max_violation < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(LinearSvmModel {
        w,
        b,
        alpha,
        sweeps,
        converged,
        primal_trace: trace,
    })
}
