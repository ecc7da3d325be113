use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::params::ParamReader;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnnConfig {
    pub k: usize,
    /// Minkowski order, `>= 1`.
    pub p: f64,
    /// Inverse-distance voting instead of uniform voting.
    pub weighted: bool,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 5,
            p: 2.0,
            weighted: false,
        }
    }
}

impl KnnConfig {
    pub fn from_params(r: &mut ParamReader<'_>, default_k: usize) -> Result<Self> {
        let k = r.usize("k", default_k)?;
        if k == 0 {
            return Err(Error::invalid("k", "must be >= 1"));
        }
        let p = r.real("p", 2.0)?;
        if p < 1.0 {
            return Err(Error::invalid("p", "Minkowski order must be >= 1"));
        }
        let weighted = r.bool("weighted", false)?;
        Ok(Self { k, p, weighted })
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "must be >= 1"));
        }
        if self.k > n {
            return Err(Error::invalid(
                "k",
                alloc::format!("k = {} exceeds the {} training rows", self.k, n),
            ));
        }
        if self.p < 1.0 {
            return Err(Error::invalid("p", "Minkowski order must be >= 1"));
        }
        Ok(())
    }
}

/// The `k` nearest training rows to `query`, as `(index, Σ|Δ|^p)` sorted by
/// distance with lower index first on exact ties.
pub fn nearest(train: &Matrix, query: &[f64], k: usize, p: f64) -> Vec<(usize, f64)> {
    let mut d: Vec<(usize, f64)> = train
        .row_iter()
        .enumerate()
        .map(|(i, r)| (i, math::minkowski_pow(r, query, p)))
        .collect();
    d.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    d.truncate(k);
    d
}

/// Voting weights for a neighbor list. Zero-distance neighbors, when present,
/// take all the weight.
fn vote_weights(neigh: &[(usize, f64)], cfg: &KnnConfig) -> Vec<f64> {
    if !cfg.weighted {
        return alloc::vec![1.0; neigh.len()];
    }
    if neigh.iter().any(|&(_, d)| d == 0.0) {
        return neigh
            .iter()
            .map(|&(_, d)| if d == 0.0 { 1.0 } else { 0.0 })
            .collect();
    }
    neigh
        .iter()
        .map(|&(_, d)| 1.0 / math::pow(d, 1.0 / cfg.p))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnClassifier {
    cfg: KnnConfig,
    x: Matrix,
    y: Vec<usize>,
    n_classes: usize,
}

impl KnnClassifier {
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, cfg: KnnConfig) -> Result<Self> {
        cfg.check(x.rows())?;
        Ok(Self {
            cfg,
            x: x.clone(),
            y: y.to_vec(),
            n_classes,
        })
    }

    /// Vote shares per class.
    pub fn predict_proba(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), self.n_classes);
        for (i, q) in x.row_iter().enumerate() {
            let neigh = nearest(&self.x, q, self.cfg.k, self.cfg.p);
            let w = vote_weights(&neigh, &self.cfg);
            let total: f64 = w.iter().sum();
            let row = out.row_mut(i);
            for (&(j, _), wj) in neigh.iter().zip(&w) {
                row[self.y[j]] += wj / total;
            }
        }
        out
    }

    /// Majority vote, lowest class index on ties.
    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        self.predict_proba(x).row_iter().map(math::argmax).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnRegressor {
    cfg: KnnConfig,
    x: Matrix,
    y: Vec<f64>,
}

impl KnnRegressor {
    pub fn fit(x: &Matrix, y: &[f64], cfg: KnnConfig) -> Result<Self> {
        cfg.check(x.rows())?;
        Ok(Self {
            cfg,
            x: x.clone(),
            y: y.to_vec(),
        })
    }

    pub fn config(&self) -> &KnnConfig {
        &self.cfg
    }

    pub fn train_x(&self) -> &Matrix {
        &self.x
    }

    pub fn train_y(&self) -> &[f64] {
        &self.y
    }

    pub fn predict_one(&self, q: &[f64]) -> f64 {
        let neigh = nearest(&self.x, q, self.cfg.k, self.cfg.p);
        let w = vote_weights(&neigh, &self.cfg);
        let total: f64 = w.iter().sum();
        neigh
            .iter()
            .zip(&w)
            .map(|(&(j, _), wj)| wj * self.y[j])
            .sum::<f64>()
            / total
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        x.row_iter().map(|q| self.predict_one(q)).collect()
    }
}
