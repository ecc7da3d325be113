use alloc::vec::Vec;

use crate::math;
use crate::matrix::Matrix;

const VAR_FLOOR: f64 = 1e-9;

/// Gaussian naive Bayes with per-class diagonal covariances. Classes with no
/// (weighted) training samples get probability zero.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianNb {
    log_prior: Vec<f64>,
    means: Matrix,
    vars: Matrix,
}

impl GaussianNb {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, weights: Option<&[f64]>) -> Self {
        let d = x.cols();
        let mut mass = alloc::vec![0.0; n_classes];
        let mut means = Matrix::zeros(n_classes, d);
        let mut vars = Matrix::zeros(n_classes, d);
        let w = |i: usize| weights.map_or(1.0, |w| w[i]);

        for (i, r) in x.row_iter().enumerate() {
            let c = y[i];
            mass[c] += w(i);
            for (m, v) in means.row_mut(c).iter_mut().zip(r) {
                *m += w(i) * v;
            }
        }
        for c in 0..n_classes {
            if mass[c] > 0.0 {
                for m in means.row_mut(c) {
                    *m /= mass[c];
                }
            }
        }
        for (i, r) in x.row_iter().enumerate() {
            let c = y[i];
            for j in 0..d {
                let e = r[j] - means[(c, j)];
                vars[(c, j)] += w(i) * e * e;
            }
        }
        let total: f64 = mass.iter().sum();
        let mut log_prior = Vec::with_capacity(n_classes);
        for c in 0..n_classes {
            for v in vars.row_mut(c) {
                *v = if mass[c] > 0.0 { *v / mass[c] } else { 0.0 };
                if *v < VAR_FLOOR {
                    *v = VAR_FLOOR;
                }
            }
            log_prior.push(if mass[c] > 0.0 {
                math::ln(mass[c] / total)
            } else {
                f64::NEG_INFINITY
            });
        }
        Self {
            log_prior,
            means,
            vars,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.log_prior.len()
    }

    pub fn joint_log_likelihood(&self, q: &[f64]) -> Vec<f64> {
        (0..self.n_classes())
            .map(|c| {
                if self.log_prior[c] == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                let mut s = self.log_prior[c];
                for (j, &v) in q.iter().enumerate() {
                    let var = self.vars[(c, j)];
                    let e = v - self.means[(c, j)];
                    s -= 0.5 * math::ln(2.0 * math::PI * var) + e * e / (2.0 * var);
                }
                s
            })
            .collect()
    }

    pub fn predict_proba(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), self.n_classes());
        for (i, q) in x.row_iter().enumerate() {
            let jll = self.joint_log_likelihood(q);
            let norm = math::log_sum_exp(&jll);
            for (o, l) in out.row_mut(i).iter_mut().zip(&jll) {
                *o = math::exp(l - norm);
            }
        }
        out
    }

    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        self.predict_proba(x).row_iter().map(math::argmax).collect()
    }
}
