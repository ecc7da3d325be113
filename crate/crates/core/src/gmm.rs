//! Semi-supervised Gaussian mixture: one full-covariance Gaussian per class,
//! fitted by EM where labeled samples keep one-hot responsibilities.

use alloc::vec::Vec;

use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsgmmConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// Added to every covariance diagonal after the M-step.
    pub reg: f64,
}

impl Default for SsgmmConfig {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-6,
            reg: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub cov: Matrix,
    chol: Cholesky,
}

impl Component {
    fn new(weight: f64, mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        let chol = Cholesky::factor(&cov).map_err(|_| {
            Error::Numerical("covariance is singular despite regularization".into())
        })?;
        Ok(Self {
            weight,
            mean,
            cov,
            chol,
        })
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        let d = x.len() as f64;
        let diff: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        -0.5 * (d * math::ln(2.0 * math::PI) + self.chol.log_det() + self.chol.mahalanobis(&diff))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GmmState {
    pub components: Vec<Component>,
    /// Joint log-likelihood evaluated at the start of every E-step.
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl GmmState {
    /// Posterior class probabilities.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Matrix> {
        let d = self.components[0].mean.len();
        if x.cols() != d && x.rows() > 0 {
            return Err(Error::dims("feature-dimension", d, x.cols()));
        }
        let k = self.components.len();
        let mut out = Matrix::zeros(x.rows(), k);
        let mut logp = alloc::vec![0.0; k];
        for (i, r) in x.row_iter().enumerate() {
            for (c, comp) in self.components.iter().enumerate() {
                logp[c] = math::ln(comp.weight) + comp.log_density(r);
            }
            let norm = math::log_sum_exp(&logp);
            for (o, l) in out.row_mut(i).iter_mut().zip(&logp) {
                *o = math::exp(l - norm);
            }
        }
        Ok(out)
    }
}

/// Weighted mean and covariance (`+ reg·I`) of the rows of `x`.
fn weighted_moments(x: &Matrix, w: &[f64], reg: f64) -> (f64, Vec<f64>, Matrix) {
    let d = x.cols();
    let mass: f64 = w.iter().sum();
    let mut mean = alloc::vec![0.0; d];
    for (r, &wi) in x.row_iter().zip(w) {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += wi * v;
        }
    }
    for m in &mut mean {
        *m /= mass;
    }
    let mut cov = Matrix::zeros(d, d);
    for (r, &wi) in x.row_iter().zip(w) {
        if wi == 0.0 {
            continue;
        }
        for a in 0..d {
            let ea = r[a] - mean[a];
            for b in 0..d {
                cov[(a, b)] += wi * ea * (r[b] - mean[b]);
            }
        }
    }
    for a in 0..d {
        for b in 0..d {
            cov[(a, b)] /= mass;
        }
        cov[(a, a)] += reg;
    }
    (mass, mean, cov)
}

fn m_step(x_all: &Matrix, resp: &Matrix, reg: f64) -> Result<Vec<Component>> {
    let n = x_all.rows() as f64;
    let k = resp.cols();
    let mut comps = Vec::with_capacity(k);
    for c in 0..k {
        let w = resp.col_values(c);
        let (mass, mean, cov) = weighted_moments(x_all, &w, reg);
        if !(mass > 0.0) {
            return Err(Error::DegenerateLabels(alloc::format!("component {c} is empty")));
        }
        comps.push(Component::new(mass / n, mean, cov)?);
    }
    Ok(comps)
}

/// EM for the semi-supervised mixture. Initialization is the labeled
/// per-class MLE; labeled responsibilities stay one-hot at their class.
pub fn ssgmm_fit(d: &TrainingSet, cfg: SsgmmConfig) -> Result<GmmState> {
    let labels = d.class_labels()?;
    let k = d.n_classes();
    if k < 2 {
        return Err(Error::DegenerateLabels("SSGMM needs at least two classes".into()));
    }
    let l = d.n_labeled();
    let u = d.n_unlabeled();
    let x_all = d.all_x();

    let mut resp = Matrix::zeros(l + u, k);
    for (i, &c) in labels.iter().enumerate() {
        resp[(i, c)] = 1.0;
    }
    let mut comps = {
        let lab = Matrix::from_vec(l, k, resp.as_slice()[..l * k].to_vec())?;
        let mut comps = m_step(&d.x, &lab, cfg.reg)?;
        for c in &mut comps {
            c.weight = c.weight.max(f64::MIN_POSITIVE);
        }
        comps
    };

    let mut ll_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut logp = alloc::vec![0.0; k];
    while iterations < cfg.max_iter {
        iterations += 1;
        // E-step and log-likelihood at the current parameters.
        let mut ll = 0.0;
        for i in 0..l {
            let c = labels[i];
            ll += math::ln(comps[c].weight) + comps[c].log_density(x_all.row(i));
        }
        for i in l..l + u {
            for (c, comp) in comps.iter().enumerate() {
                logp[c] = math::ln(comp.weight) + comp.log_density(x_all.row(i));
            }
            let norm = math::log_sum_exp(&logp);
            ll += norm;
            for (c, lp) in logp.iter().enumerate() {
                resp[(i, c)] = math::exp(lp - norm);
            }
        }
        if !ll.is_finite() {
            return Err(Error::Numerical("non-finite log-likelihood".into()));
        }
        let improvement = ll_trace.last().map(|prev| ll - prev);
        ll_trace.push(ll);
        if let Some(gain) = improvement {
            if gain < cfg.tol {
                converged = true;
                break;
            }
        }
        comps = m_step(&x_all, &resp, cfg.reg)?;
    }

    Ok(GmmState {
        components: comps,
        log_likelihood: ll_trace,
        iterations,
        converged,
    })
}
