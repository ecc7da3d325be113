//! Constrained clustering. [`constrained_kmeans_fit`] takes pairwise
//! must-link / cannot-link constraints (COP k-means);
//! [`constrained_seed_kmeans_fit`] starts from labeled seeds and can clamp
//! them to their class cluster.

mod cop_kmeans;
mod seed_kmeans;

pub use cop_kmeans::{constrained_kmeans_fit, CopKmeansConfig, PairConstraints};
pub use seed_kmeans::{constrained_seed_kmeans_fit, SeedKmeansConfig};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringResult {
    /// Cluster id in `0..k` for every training row.
    pub assignments: Vec<usize>,
    pub centroids: Matrix,
    pub objective: f64,
    /// Objective after every centroid update.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl ClusteringResult {
    /// Nearest centroid, lower id on ties.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        if x.rows() > 0 && x.cols() != self.centroids.cols() {
            return Err(Error::dims("feature-dimension", self.centroids.cols(), x.cols()));
        }
        Ok(x.row_iter().map(|r| nearest_centroid(&self.centroids, r)).collect())
    }
}

pub(crate) fn nearest_centroid(c: &Matrix, r: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, cj) in c.row_iter().enumerate() {
        let d = math::squared_distance(r, cj);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

pub(crate) fn objective(x: &Matrix, a: &[usize], c: &Matrix) -> f64 {
    x.row_iter()
        .zip(a)
        .map(|(r, &j)| math::squared_distance(r, c.row(j)))
        .sum()
}

/// Cluster means. Clusters with no members keep their previous centroid
/// and are reported back.
pub(crate) fn update_centroids(x: &Matrix, a: &[usize], c: &mut Matrix) -> Vec<usize> {
    let k = c.rows();
    let d = x.cols();
    let mut sums = Matrix::zeros(k, d);
    let mut counts = alloc::vec![0usize; k];
    for (r, &j) in x.row_iter().zip(a) {
        counts[j] += 1;
        for (s, v) in sums.row_mut(j).iter_mut().zip(r) {
            *s += v;
        }
    }
    let mut empty = Vec::new();
    for j in 0..k {
        if counts[j] == 0 {
            empty.push(j);
            continue;
        }
        for (cv, s) in c.row_mut(j).iter_mut().zip(sums.row(j)) {
            *cv = s / counts[j] as f64;
        }
    }
    empty
}

/// Moves each empty centroid onto the row farthest from its own centroid,
/// among rows for which `movable` holds. Assignments are left alone.
pub(crate) fn reseed_empty(x: &Matrix, a: &[usize], c: &mut Matrix, empty: &[usize], movable: impl Fn(usize) -> bool) {
    let mut used = alloc::vec![false; x.rows()];
    for &j in empty {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in x.row_iter().enumerate() {
            if used[i] || !movable(i) {
                continue;
            }
            let d = math::squared_distance(r, c.row(a[i]));
            if best.map_or(true, |(_, b)| d > b) {
                best = Some((i, d));
            }
        }
        if let Some((i, _)) = best {
            used[i] = true;
            c.row_mut(j).copy_from_slice(x.row(i));
        }
    }
}
