use alloc::vec::Vec;

use super::AffinityGraph;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationResult {
    /// Final iterate before row normalization.
    pub raw: Matrix,
    /// Row-normalized class distribution. Rows with no mass are uniform.
    pub distribution: Matrix,
    pub iterations: usize,
    pub converged: bool,
    /// `max|ΔF|` of every sweep.
    pub deltas: Vec<f64>,
}

impl PropagationResult {
    pub fn labels(&self) -> Vec<usize> {
        self.distribution.row_iter().map(math::argmax).collect()
    }
}

fn prior(seeds: &[Option<usize>], n_classes: usize, n: usize) -> Result<Matrix> {
    if seeds.len() != n {
        return Err(Error::dims("seed label count", n, seeds.len()));
    }
    let mut y = Matrix::zeros(n, n_classes);
    for (i, s) in seeds.iter().enumerate() {
        if let Some(c) = *s {
            if c >= n_classes {
                return Err(Error::InvalidData(alloc::format!("class {c} out of range")));
            }
            y[(i, c)] = 1.0;
        }
    }
    Ok(y)
}

fn normalize_rows(f: &Matrix) -> Matrix {
    let mut out = f.clone();
    let k = out.cols() as f64;
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            for v in row.iter_mut() {
                *v /= s;
            }
        } else {
            for v in row.iter_mut() {
                *v = 1.0 / k;
            }
        }
    }
    out
}

/// Hard-clamped propagation: `F ← D⁻¹ W F`, then every seeded row is reset to
/// its one-hot vector. Unseeded rows start at zero. `observe` sees `F` after
/// every sweep.
pub fn label_propagation(
    g: &AffinityGraph,
    seeds: &[Option<usize>],
    n_classes: usize,
    cfg: PropagationConfig,
    mut observe: impl FnMut(usize, &Matrix),
) -> Result<PropagationResult> {
    let n = g.n();
    let y = prior(seeds, n_classes, n)?;
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let mut f = y.clone();
    let mut next = Matrix::zeros(n, n_classes);
    let mut deltas = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        for i in 0..n {
            let row = next.row_mut(i);
            if let Some(c) = seeds[i] {
                row.fill(0.0);
                row[c] = 1.0;
                continue;
            }
            row.fill(0.0);
            if degree[i] == 0.0 {
                continue;
            }
            for &(j, w) in g.neighbors(i) {
                let scale = w / degree[i];
                for (o, v) in row.iter_mut().zip(f.row(j)) {
                    *o += scale * v;
                }
            }
        }
        let delta = next.max_abs_diff(&f);
        core::mem::swap(&mut f, &mut next);
        deltas.push(delta);
        observe(iterations, &f);
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(PropagationResult {
        distribution: normalize_rows(&f),
        raw: f,
        iterations,
        converged,
        deltas,
    })
}

/// Normalized-graph spreading: `F ← α S F + (1 − α) Y` from `F = Y`, with
/// `S = D^{-1/2} W D^{-1/2}`. The fixed point is `(1 − α)(I − α S)⁻¹ Y`.
pub fn label_spreading(
    g: &AffinityGraph,
    seeds: &[Option<usize>],
    n_classes: usize,
    alpha: f64,
    cfg: PropagationConfig,
) -> Result<PropagationResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", "must lie in (0, 1)"));
    }
    let n = g.n();
    let y = prior(seeds, n_classes, n)?;
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| {
            let d = g.degree(i);
            if d > 0.0 {
                1.0 / math::sqrt(d)
            } else {
                0.0
            }
        })
        .collect();
    let mut f = y.clone();
    let mut next = Matrix::zeros(n, n_classes);
    let mut deltas = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        for i in 0..n {
            let row = next.row_mut(i);
            for (o, v) in row.iter_mut().zip(y.row(i)) {
                *o = (1.0 - alpha) * v;
            }
            for &(j, w) in g.neighbors(i) {
                let s = alpha * inv_sqrt[i] * w * inv_sqrt[j];
                for (o, v) in row.iter_mut().zip(f.row(j)) {
                    *o += s * v;
                }
            }
        }
        let delta = next.max_abs_diff(&f);
        core::mem::swap(&mut f, &mut next);
        deltas.push(delta);
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(PropagationResult {
        distribution: normalize_rows(&f),
        raw: f,
        iterations,
        converged,
        deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use alloc::vec;

    fn chain() -> AffinityGraph {
        let w = Matrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]).unwrap();
        AffinityGraph::from_dense(&w).unwrap()
    }

    #[test]
    fn propagation_chain_midpoint_ties_to_class_zero() {
        let seeds = [Some(0), None, Some(1)];
        let r = label_propagation(&chain(), &seeds, 2, PropagationConfig::default(), |_, _| {}).unwrap();
        assert!(r.converged);
        assert_eq!(r.distribution.row(1), &[0.5, 0.5]);
        assert_eq!(r.labels(), vec![0, 0, 1]);
    }

    #[test]
    fn propagation_single_class_neighborhood() {
        let w = Matrix::from_rows(&[
            [0.0, 1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        // node 3 is isolated and labeled with class 1 to make K = 2
        let g = AffinityGraph::from_dense(&w).unwrap();
        let seeds = [None, Some(0), Some(0), Some(1)];
        let r = label_propagation(&g, &seeds, 2, PropagationConfig::default(), |_, _| {}).unwrap();
        assert_eq!(r.distribution.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn propagation_with_everything_labeled_is_a_fixpoint() {
        let seeds = [Some(0), Some(1), Some(1)];
        let r = label_propagation(&chain(), &seeds, 2, PropagationConfig::default(), |_, _| {}).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.distribution.as_slice(), &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn propagation_clamps_every_sweep() {
        let (x, y) = crate::data::gen_two_moons(40, 0.1, 3);
        let g = super::super::build_knn_graph(&x, 5, super::super::GraphMode::Rbf, 2.0).unwrap();
        let y = y.as_class().unwrap();
        let seeds: Vec<Option<usize>> = (0..40)
            .map(|i| if i % 7 == 0 { Some(y[i] as usize) } else { None })
            .collect();
        let mut sweeps = 0;
        label_propagation(&g, &seeds, 2, PropagationConfig::default(), |_, f| {
            sweeps += 1;
            for (i, s) in seeds.iter().enumerate() {
                if let Some(c) = *s {
                    let mut e = [0.0; 2];
                    e[c] = 1.0;
                    assert_eq!(f.row(i), &e);
                }
            }
        })
        .unwrap();
        assert!(sweeps > 1);
    }

    #[test]
    fn spreading_chain_matches_closed_form_and_ties() {
        let alpha = 0.5;
        let seeds = [Some(0), None, Some(1)];
        let cfg = PropagationConfig {
            tol: 1e-12,
            max_iter: 10_000,
        };
        let r = label_spreading(&chain(), &seeds, 2, alpha, cfg).unwrap();
        // S for the chain: off-diagonals 1/sqrt(2)
        let s = 1.0 / 2f64.sqrt();
        let a = Matrix::from_rows(&[
            [1.0, -alpha * s, 0.0],
            [-alpha * s, 1.0, -alpha * s],
            [0.0, -alpha * s, 1.0],
        ])
        .unwrap();
        let y = Matrix::from_rows(&[[0.5, 0.0], [0.0, 0.0], [0.0, 0.5]]).unwrap();
        let exact = linalg::solve(&a, &y).unwrap();
        assert!(r.raw.max_abs_diff(&exact) < 1e-10);
        assert_eq!(r.raw[(1, 0)], r.raw[(1, 1)]);
        assert_eq!(r.labels()[1], 0);
    }

    #[test]
    fn spreading_with_tiny_alpha_keeps_labeled_argmax() {
        let alpha = 1e-9;
        let seeds = [Some(0), None, Some(1)];
        let r = label_spreading(&chain(), &seeds, 2, alpha, PropagationConfig::default()).unwrap();
        assert_eq!(r.labels()[0], 0);
        assert_eq!(r.labels()[2], 1);
        // middle row ≈ alpha/sqrt(2) · (1 − alpha) per class
        let expected = alpha / 2f64.sqrt();
        assert!((r.raw[(1, 0)] - expected).abs() < 1e-15);
    }

    #[test]
    fn disconnected_component_gets_uniform_scores() {
        let w = Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let g = AffinityGraph::from_dense(&w).unwrap();
        let seeds = [Some(0), Some(1), None, None];
        let r = label_spreading(&g, &seeds, 2, 0.9, PropagationConfig::default()).unwrap();
        assert_eq!(r.distribution.row(2), &[0.5, 0.5]);
        assert_eq!(r.labels()[2], 0);
    }

    #[test]
    fn rejects_alpha_outside_open_interval() {
        let seeds = [Some(0), None, Some(1)];
        for alpha in [0.0, 1.0, -0.1] {
            assert!(label_spreading(&chain(), &seeds, 2, alpha, PropagationConfig::default()).is_err());
        }
    }
}
