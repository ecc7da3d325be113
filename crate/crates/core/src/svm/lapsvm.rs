use alloc::vec::Vec;

use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::graph::{build_knn_graph, default_gamma, GraphMode};
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LapSvmConfig {
    pub gamma_a: f64,
    pub gamma_i: f64,
    /// RBF width; `None` uses the same scale-aware default as the graph.
    pub gamma: Option<f64>,
    pub k: usize,
    pub iters: usize,
}

impl Default for LapSvmConfig {
    fn default() -> Self {
        Self {
            gamma_a: 1e-2,
            gamma_i: 1e-2,
            gamma: None,
            k: 7,
            iters: 500,
        }
    }
}

/// `f(x) = Σ α_i K(x_i, x) + b` over the retained training points.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelModel {
    pub x_train: Matrix,
    pub alpha: Vec<f64>,
    pub b: f64,
    pub gamma: f64,
    pub objective_trace: Vec<f64>,
    pub converged: bool,
}

impl KernelModel {
    pub fn decision(&self, q: &[f64]) -> f64 {
        self.x_train
            .row_iter()
            .zip(&self.alpha)
            .map(|(r, a)| a * math::exp(-self.gamma * math::squared_distance(r, q)))
            .sum::<f64>()
            + self.b
    }

    pub fn decision_function(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|q| self.decision(q)).collect()
    }
}

pub fn rbf_gram(x: &Matrix, gamma: f64) -> Matrix {
    let n = x.rows();
    let mut k = Matrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let v = math::exp(-gamma * math::squared_distance(x.row(i), x.row(j)));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// The LapSVM objective over `α`, with the first `y.len()` points labeled:
/// `(1/l)Σ max(0, 1 − y_i f_i)² + γ_A αᵀKα + (γ_I/n²) fᵀLf` where `f = Kα`.
#[derive(Clone, Debug, PartialEq)]
pub struct LapSvmProblem {
    pub gram: Matrix,
    pub laplacian: Matrix,
    pub y: Vec<f64>,
    pub gamma_a: f64,
    pub gamma_i: f64,
}

impl LapSvmProblem {
    fn parts(&self, alpha: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let f = self.gram.matvec(alpha);
        let lf = self.laplacian.matvec(&f);
        (f, lf)
    }

    pub fn objective(&self, alpha: &[f64]) -> f64 {
        let n = alpha.len() as f64;
        let l = self.y.len() as f64;
        let (f, lf) = self.parts(alpha);
        let loss: f64 = self
            .y
            .iter()
            .zip(&f)
            .map(|(y, fi)| {
                let m = (1.0 - y * fi).max(0.0);
                m * m
            })
            .sum();
        loss / l + self.gamma_a * math::dot(alpha, &f) + self.gamma_i / (n * n) * math::dot(&f, &lf)
    }

    pub fn gradient(&self, alpha: &[f64]) -> Vec<f64> {
        let n = alpha.len() as f64;
        let l = self.y.len() as f64;
        let (f, lf) = self.parts(alpha);
        // dJ/df, then chain through f = Kα (K symmetric)
        let mut g_f: Vec<f64> = lf.iter().map(|v| 2.0 * self.gamma_i / (n * n) * v).collect();
        for (i, y) in self.y.iter().enumerate() {
            let m = (1.0 - y * f[i]).max(0.0);
            g_f[i] += -2.0 * y * m / l;
        }
        let mut g = self.gram.matvec(&g_f);
        for (gi, fi) in g.iter_mut().zip(&f) {
            *gi += 2.0 * self.gamma_a * fi;
        }
        g
    }
}

pub struct LapSvmRun {
    pub alpha: Vec<f64>,
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// Gradient descent with Barzilai–Borwein step guesses, halved while the
/// objective would increase. Stops on a vanishing gradient or when no
/// decreasing step exists.
pub fn minimize(p: &LapSvmProblem, iters: usize) -> Result<LapSvmRun> {
    let n = p.gram.rows();
    let mut alpha = alloc::vec![0.0; n];
    let mut j = p.objective(&alpha);
    let mut grad = p.gradient(&alpha);
    let mut step = 1.0;
    let mut trace = alloc::vec![j];
    let mut converged = false;
    for _ in 0..iters {
        let gnorm = math::sqrt(math::dot(&grad, &grad));
        if gnorm < 1e-10 {
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut s = step;
        for _ in 0..60 {
            let cand: Vec<f64> = alpha.iter().zip(&grad).map(|(a, g)| a - s * g).collect();
            let jc = p.objective(&cand);
            if !jc.is_finite() {
                s *= 0.5;
                continue;
            }
            if jc <= j {
                accepted = Some((cand, jc));
                break;
            }
            s *= 0.5;
        }
        let Some((cand, jc)) = accepted else {
            if !j.is_finite() {
                return Err(Error::Numerical("LapSVM objective is not finite".into()));
            }
            converged = true;
            break;
        };
        let new_grad = p.gradient(&cand);
        let ds: Vec<f64> = cand.iter().zip(&alpha).map(|(a, b)| a - b).collect();
        let dg: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = math::dot(&ds, &dg);
        step = if sy > 0.0 { math::dot(&ds, &ds) / sy } else { 2.0 * s };
        let done = j - jc <= 1e-15 * j.abs().max(1.0);
        alpha = cand;
        grad = new_grad;
        j = jc;
        trace.push(j);
        if done {
            converged = true;
            break;
        }
    }
    Ok(LapSvmRun {
        alpha,
        trace,
        converged,
    })
}

/// Laplacian SVM with the primal squared-hinge objective. Binary only.
pub fn lapsvm_fit(d: &TrainingSet, cfg: LapSvmConfig) -> Result<KernelModel> {
    let labels = d.class_labels()?;
    if d.n_classes() != 2 {
        return Err(Error::Unsupported("LapSVM is binary only".into()));
    }
    if cfg.gamma_a < 0.0 || cfg.gamma_i < 0.0 {
        return Err(Error::invalid("gamma_A", "regularization weights must be >= 0"));
    }
    let x_all = d.all_x();
    let gamma = match cfg.gamma {
        Some(g) if g > 0.0 => g,
        Some(_) => return Err(Error::invalid("gamma", "must be > 0")),
        None => default_gamma(&x_all),
    };
    let n = x_all.rows();
    let laplacian = if cfg.gamma_i > 0.0 {
        let k = cfg.k.min(n.saturating_sub(1)).max(1);
        if n < 2 {
            Matrix::zeros(n, n)
        } else {
            build_knn_graph(&x_all, k, GraphMode::Rbf, gamma)?.normalized_laplacian()
        }
    } else {
        Matrix::zeros(n, n)
    };
    let problem = LapSvmProblem {
        gram: rbf_gram(&x_all, gamma),
        laplacian,
        y: labels.iter().map(|&c| if c == 1 { 1.0 } else { -1.0 }).collect(),
        gamma_a: cfg.gamma_a,
        gamma_i: cfg.gamma_i,
    };
    let run = minimize(&problem, cfg.iters)?;
    Ok(KernelModel {
        x_train: x_all,
        alpha: run.alpha,
        b: 0.0,
        gamma,
        objective_trace: run.trace,
        converged: run.converged,
    })
}
