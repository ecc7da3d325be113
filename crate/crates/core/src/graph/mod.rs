//! Transductive graph construction with label propagation and label
//! spreading on top of it.

mod propagation;

pub use propagation::{label_propagation, label_spreading, PropagationConfig, PropagationResult};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMode {
    /// `exp(-gamma·‖xi − xj‖²)`
    Rbf,
    /// Weight 1 for every kept edge.
    Connectivity,
}

impl GraphMode {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "rbf" => Ok(GraphMode::Rbf),
            "connectivity" => Ok(GraphMode::Connectivity),
            other => Err(Error::invalid("mode", alloc::format!("unknown graph mode `{other}`"))),
        }
    }
}

/// Sparse symmetric nonnegative weights without self-loops. Adjacency lists
/// are sorted by neighbor index.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityGraph {
    adj: Vec<Vec<(usize, f64)>>,
}

impl AffinityGraph {
    /// From a dense weight matrix; zero entries are not stored.
    pub fn from_dense(w: &Matrix) -> Result<Self> {
        let n = w.rows();
        if w.cols() != n {
            return Err(Error::dims("square weight matrix", n, w.cols()));
        }
        let mut adj = alloc::vec![Vec::new(); n];
        for i in 0..n {
            if w[(i, i)] != 0.0 {
                return Err(Error::InvalidData("self-loop in affinity graph".into()));
            }
            for j in 0..n {
                let v = w[(i, j)];
                if v < 0.0 || !v.is_finite() || v != w[(j, i)] {
                    return Err(Error::InvalidData(
                        "affinity weights must be finite, nonnegative and symmetric".into(),
                    ));
                }
                if v > 0.0 {
                    adj[i].push((j, v));
                }
            }
        }
        Ok(Self { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adj[i]
            .binary_search_by(|&(k, _)| k.cmp(&j))
            .map_or(0.0, |p| self.adj[i][p].1)
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.n();
        let mut w = Matrix::zeros(n, n);
        for (i, row) in self.adj.iter().enumerate() {
            for &(j, v) in row {
                w[(i, j)] = v;
            }
        }
        w
    }

    /// `I − D^{-1/2} W D^{-1/2}`, with isolated nodes contributing only the
    /// identity entry.
    pub fn normalized_laplacian(&self) -> Matrix {
        let n = self.n();
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|i| {
                let d = self.degree(i);
                if d > 0.0 {
                    1.0 / math::sqrt(d)
                } else {
                    0.0
                }
            })
            .collect();
        let mut l = Matrix::identity(n);
        for (i, row) in self.adj.iter().enumerate() {
            for &(j, v) in row {
                l[(i, j)] -= inv_sqrt[i] * v * inv_sqrt[j];
            }
        }
        l
    }
}

/// `1 / (cols · mean column variance)`, or 1 when the data has no spread.
pub fn default_gamma(x: &Matrix) -> f64 {
    let cols = x.cols().max(1);
    let mean_var = (0..x.cols())
        .map(|j| math::variance(&x.col_values(j)))
        .sum::<f64>()
        / cols as f64;
    if mean_var > 0.0 {
        1.0 / (cols as f64 * mean_var)
    } else {
        1.0
    }
}

/// Directed k-nearest-neighbor graph by Euclidean distance (self excluded,
/// lower index first on distance ties), symmetrized by elementwise max.
pub fn build_knn_graph(x: &Matrix, k: usize, mode: GraphMode, gamma: f64) -> Result<AffinityGraph> {
    let n = x.rows();
    if k == 0 || k >= n {
        return Err(Error::invalid(
            "k",
            alloc::format!("need 1 <= k < n = {n}, got {k}"),
        ));
    }
    if mode == GraphMode::Rbf && !(gamma > 0.0) {
        return Err(Error::invalid("gamma", "must be > 0"));
    }
    let mut dense = Matrix::zeros(n, n);
    let mut cand: Vec<(usize, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        cand.clear();
        cand.extend(
            (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, math::squared_distance(x.row(i), x.row(j)))),
        );
        cand.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        for &(j, d2) in &cand[..k] {
            let w = match mode {
                GraphMode::Rbf => math::exp(-gamma * d2),
                GraphMode::Connectivity => 1.0,
            };
            dense[(i, j)] = w;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let w = dense[(i, j)].max(dense[(j, i)]);
            dense[(i, j)] = w;
            dense[(j, i)] = w;
        }
    }
    AffinityGraph::from_dense(&dense)
}
