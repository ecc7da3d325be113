use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::params::ParamReader;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogisticConfig {
    pub lr: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            lr: 0.5,
            epochs: 300,
            l2: 1e-3,
        }
    }
}

impl LogisticConfig {
    pub fn from_params(r: &mut ParamReader<'_>) -> Result<Self> {
        let d = Self::default();
        let lr = r.real("lr", d.lr)?;
        if lr <= 0.0 {
            return Err(Error::invalid("lr", "must be > 0"));
        }
        let l2 = r.real("l2", d.l2)?;
        if l2 < 0.0 {
            return Err(Error::invalid("l2", "must be >= 0"));
        }
        Ok(Self {
            lr,
            epochs: r.usize("epochs", d.epochs)?,
            l2,
        })
    }
}

/// Multinomial (softmax) logistic regression trained by full-batch gradient
/// descent on weighted cross-entropy plus `(l2/2)·‖W‖²`. A step that would
/// raise the loss is halved until it does not, so the loss trace never
/// increases. Weights start at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticRegression {
    w: Matrix,
    b: Vec<f64>,
    loss_trace: Vec<f64>,
}

struct Problem<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    sw: Vec<f64>,
    k: usize,
    l2: f64,
}

impl Problem<'_> {
    fn loss(&self, w: &Matrix, b: &[f64]) -> f64 {
        let mut loss = 0.0;
        let mut z = alloc::vec![0.0; self.k];
        for (i, r) in self.x.row_iter().enumerate() {
            for c in 0..self.k {
                z[c] = math::dot(w.row(c), r) + b[c];
            }
            loss += self.sw[i] * (math::log_sum_exp(&z) - z[self.y[i]]);
        }
        let reg: f64 = w.as_slice().iter().map(|v| v * v).sum();
        loss + 0.5 * self.l2 * reg
    }

    fn gradient(&self, w: &Matrix, b: &[f64]) -> (Matrix, Vec<f64>) {
        let mut gw = Matrix::zeros(self.k, self.x.cols());
        let mut gb = alloc::vec![0.0; self.k];
        let mut z = alloc::vec![0.0; self.k];
        for (i, r) in self.x.row_iter().enumerate() {
            for c in 0..self.k {
                z[c] = math::dot(w.row(c), r) + b[c];
            }
            math::softmax_in_place(&mut z);
            z[self.y[i]] -= 1.0;
            for c in 0..self.k {
                let g = self.sw[i] * z[c];
                gb[c] += g;
                for (gv, xv) in gw.row_mut(c).iter_mut().zip(r) {
                    *gv += g * xv;
                }
            }
        }
        for (g, v) in gw.as_mut_slice().iter_mut().zip(w.as_slice()) {
            *g += self.l2 * v;
        }
        (gw, gb)
    }
}

impl LogisticRegression {
    pub fn fit(
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        weights: Option<&[f64]>,
        cfg: LogisticConfig,
    ) -> Self {
        let n = x.rows();
        let sw: Vec<f64> = match weights {
            Some(w) => {
                let s: f64 = w.iter().sum();
                w.iter().map(|v| v / s).collect()
            }
            None => alloc::vec![1.0 / n as f64; n],
        };
        let p = Problem {
            x,
            y,
            sw,
            k: n_classes,
            l2: cfg.l2,
        };
        let mut w = Matrix::zeros(n_classes, x.cols());
        let mut b = alloc::vec![0.0; n_classes];
        let mut loss = p.loss(&w, &b);
        let mut loss_trace = alloc::vec![loss];

        'epochs: for _ in 0..cfg.epochs {
            let (gw, gb) = p.gradient(&w, &b);
            let mut step = cfg.lr;
            for _ in 0..60 {
                let mut w2 = w.clone();
                for (v, g) in w2.as_mut_slice().iter_mut().zip(gw.as_slice()) {
                    *v -= step * g;
                }
                let b2: Vec<f64> = b.iter().zip(&gb).map(|(v, g)| v - step * g).collect();
                let l2 = p.loss(&w2, &b2);
                if l2 <= loss {
                    w = w2;
                    b = b2;
                    loss = l2;
                    loss_trace.push(loss);
                    continue 'epochs;
                }
                step *= 0.5;
            }
            break;
        }
        Self { w, b, loss_trace }
    }

    pub fn n_classes(&self) -> usize {
        self.b.len()
    }

    pub fn loss_trace(&self) -> &[f64] {
        &self.loss_trace
    }

    pub fn weights(&self) -> &Matrix {
        &self.w
    }

    pub fn predict_proba(&self, x: &Matrix) -> Matrix {
        let k = self.n_classes();
        let mut out = Matrix::zeros(x.rows(), k);
        for (i, r) in x.row_iter().enumerate() {
            let row = out.row_mut(i);
            for c in 0..k {
                row[c] = math::dot(self.w.row(c), r) + self.b[c];
            }
            math::softmax_in_place(row);
        }
        out
    }

    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        self.predict_proba(x).row_iter().map(math::argmax).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_init_gives_uniform_probability() {
        let x = Matrix::column(&[-1.0, 1.0]);
        let cfg = LogisticConfig {
            epochs: 0,
            ..LogisticConfig::default()
        };
        let m = LogisticRegression::fit(&x, &[0, 1], 2, None, cfg);
        let p = m.predict_proba(&x);
        assert!(p.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn fitting_lowers_loss_monotonically() {
        let x = Matrix::column(&[-2.0, -1.0, 1.0, 2.0]);
        let m = LogisticRegression::fit(&x, &[0, 0, 1, 1], 2, None, LogisticConfig::default());
        let t = m.loss_trace();
        assert!(t.last().unwrap() < &t[0]);
        assert!(t.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(m.predict(&x), alloc::vec![0, 0, 1, 1]);
    }

    #[test]
    fn heavy_l2_recovers_class_priors() {
        // priors 3/4 and 1/4; a strong l2 pins the weights near zero and the
        // unregularized bias fits the log prior ratio.
        let x = Matrix::column(&[-3.0, -1.0, 0.5, 2.0]);
        let cfg = LogisticConfig {
            lr: 0.5,
            epochs: 5000,
            l2: 100.0,
        };
        let m = LogisticRegression::fit(&x, &[0, 0, 0, 1], 2, None, cfg);
        assert!(m.weights().as_slice().iter().all(|w| w.abs() < 1e-2));
        let p = m.predict_proba(&Matrix::column(&[0.0]));
        assert!((p[(0, 0)] - 0.75).abs() < 1e-2, "{:?}", p);
    }
}
