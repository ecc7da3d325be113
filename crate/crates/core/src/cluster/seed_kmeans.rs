use alloc::vec::Vec;

use super::{nearest_centroid, objective, reseed_empty, update_centroids, ClusteringResult};
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedKmeansConfig {
    /// Keep seeds in their class cluster for the whole run.
    pub clamp: bool,
    pub max_iter: usize,
}

impl Default for SeedKmeansConfig {
    fn default() -> Self {
        Self {
            clamp: false,
            max_iter: 300,
        }
    }
}

/// k-means over labeled and unlabeled rows (in that order) with one cluster
/// per class, initialized at the class seed means.
pub fn constrained_seed_kmeans_fit(d: &TrainingSet, cfg: SeedKmeansConfig) -> Result<ClusteringResult> {
    let seeds = d.class_labels()?;
    let k = d.n_classes();
    if k == 0 {
        return Err(Error::DegenerateLabels("no seed classes".into()));
    }
    if cfg.max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be >= 1"));
    }
    let l = d.n_labeled();
    let x = d.all_x();
    let mut c = Matrix::zeros(k, x.cols());
    let empty = update_centroids(&d.x, seeds, &mut c);
    if let Some(&j) = empty.first() {
        return Err(Error::DegenerateLabels(alloc::format!("class {j} has no labeled seed")));
    }

    let assign = |c: &Matrix| -> Vec<usize> {
        x.row_iter()
            .enumerate()
            .map(|(i, r)| {
                if cfg.clamp && i < l {
                    seeds[i]
                } else {
                    nearest_centroid(c, r)
                }
            })
            .collect()
    };

    let mut a = assign(&c);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let empty = update_centroids(&x, &a, &mut c);
        reseed_empty(&x, &a, &mut c, &empty, |i| !(cfg.clamp && i < l));
        iterations += 1;
        trace.push(objective(&x, &a, &c));
        if iterations >= cfg.max_iter {
            break;
        }
        let next = assign(&c);
        if next == a {
            converged = true;
            break;
        }
        a = next;
    }
    Ok(ClusteringResult {
        objective: *trace.last().expect("at least one update"),
        assignments: a,
        centroids: c,
        objective_trace: trace,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{validate, Labels, SslDataset, TaskKind};

    fn set(x: Matrix, y: Vec<i64>, u: Matrix) -> TrainingSet {
        validate(&SslDataset::new(x, Labels::Class(y), u), TaskKind::Clustering).unwrap()
    }

    #[test]
    fn seeds_at_exact_centers_converge_at_once() {
        let (x, _) = crate::data::gen_blobs(40, 2, 0.0, 1);
        let seeds = Matrix::from_rows(&[x.row(0), x.row(39)]).unwrap();
        let r = constrained_seed_kmeans_fit(&set(seeds, alloc::vec![0, 1], x), SeedKmeansConfig::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn clamped_mislabeled_seed_stays_put() {
        let x = Matrix::column(&[0.0, 0.2, 10.0, 10.2, 0.1]);
        let u = Matrix::column(&[0.05, 0.15, 10.1, 9.9]);
        let y = alloc::vec![0, 0, 1, 1, 1];
        let clamped = constrained_seed_kmeans_fit(
            &set(x.clone(), y.clone(), u.clone()),
            SeedKmeansConfig { clamp: true, max_iter: 300 },
        )
        .unwrap();
        assert_eq!(clamped.assignments[4], 1);
        let free = constrained_seed_kmeans_fit(&set(x, y, u), SeedKmeansConfig::default()).unwrap();
        assert_eq!(free.assignments[4], 0);
        assert!(clamped.objective >= free.objective);
    }

    #[test]
    fn fully_labeled_clamped_run_keeps_labels() {
        let x = Matrix::column(&[0.0, 1.0, 2.0, 7.0, 9.0]);
        let y = alloc::vec![0, 1, 0, 1, 1];
        let r = constrained_seed_kmeans_fit(
            &set(x, y, Matrix::zeros(0, 1)),
            SeedKmeansConfig { clamp: true, max_iter: 300 },
        )
        .unwrap();
        assert_eq!(r.assignments, alloc::vec![0, 1, 0, 1, 1]);
        assert_eq!(r.centroids.as_slice(), &[1.0, 17.0 / 3.0]);
    }

    #[test]
    fn objective_never_increases() {
        let (x, y) = crate::data::gen_blobs(60, 3, 3.0, 2);
        let y = y.as_class().unwrap();
        let seeds = [0usize, 20, 40];
        let t = set(x.select_rows(&seeds), seeds.iter().map(|&i| y[i]).collect(), x.clone());
        let r = constrained_seed_kmeans_fit(&t, SeedKmeansConfig::default()).unwrap();
        for w in r.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
    }
}
