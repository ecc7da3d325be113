use alloc::vec::Vec;

use crate::math;
use crate::matrix::Matrix;

/// One-level decision tree: `x[feature] <= threshold` goes left.
///
/// Each side predicts its weighted majority class, so a single stump covers
/// both polarities in the binary case. `feature == None` is the constant
/// stump that sends everything right.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionStump {
    pub feature: Option<usize>,
    pub threshold: f64,
    left: Vec<f64>,
    right: Vec<f64>,
    /// Weighted 0/1 training error, as a fraction of the total weight.
    pub weighted_error: f64,
}

fn majority_error(mass: &[f64]) -> f64 {
    let total: f64 = mass.iter().sum();
    let best = mass.iter().copied().fold(0.0, f64::max);
    total - best
}

fn normalized(mass: &[f64]) -> Vec<f64> {
    let total: f64 = mass.iter().sum();
    if total > 0.0 {
        mass.iter().map(|m| m / total).collect()
    } else {
        let k = mass.len().max(1) as f64;
        mass.iter().map(|_| 1.0 / k).collect()
    }
}

impl DecisionStump {
    /// Exhaustive search over every feature and every midpoint between
    /// consecutive distinct values. The constant stump is evaluated first and
    /// a candidate replaces the incumbent only when strictly better, so ties
    /// resolve to the constant stump, then the lowest feature, then the lowest
    /// threshold.
    pub fn fit(x: &Matrix, y: &[usize], n_classes: usize, weights: Option<&[f64]>) -> Self {
        let n = x.rows();
        let w: Vec<f64> = match weights {
            Some(w) => w.to_vec(),
            None => alloc::vec![1.0; n],
        };
        let total_w: f64 = w.iter().sum();
        let mut totals = alloc::vec![0.0; n_classes];
        for i in 0..n {
            totals[y[i]] += w[i];
        }
        let eps = 1e-12 * total_w.max(f64::MIN_POSITIVE);

        let mut best_err = majority_error(&totals);
        let mut best: (Option<usize>, f64, Vec<f64>, Vec<f64>) =
            (None, f64::NEG_INFINITY, alloc::vec![0.0; n_classes], totals.clone());

        let mut order: Vec<usize> = (0..n).collect();
        for j in 0..x.cols() {
            order.sort_by(|&a, &b| x[(a, j)].total_cmp(&x[(b, j)]).then(a.cmp(&b)));
            let mut left = alloc::vec![0.0; n_classes];
            for pos in 0..n.saturating_sub(1) {
                let i = order[pos];
                left[y[i]] += w[i];
                let here = x[(i, j)];
                let next = x[(order[pos + 1], j)];
                if next == here {
                    continue;
                }
                let right: Vec<f64> = totals.iter().zip(&left).map(|(t, l)| t - l).collect();
                let err = majority_error(&left) + majority_error(&right);
                if err < best_err - eps {
                    best_err = err;
                    best = (Some(j), 0.5 * (here + next), left.clone(), right);
                }
            }
        }
        let (feature, threshold, left, right) = best;
        Self {
            feature,
            threshold,
            left: normalized(&left),
            right: normalized(&right),
            weighted_error: if total_w > 0.0 {
                (best_err / total_w).max(0.0)
            } else {
                0.0
            },
        }
    }

    fn side(&self, q: &[f64]) -> &[f64] {
        match self.feature {
            Some(j) if q[j] <= self.threshold => &self.left,
            _ => &self.right,
        }
    }

    pub fn predict_one(&self, q: &[f64]) -> usize {
        math::argmax(self.side(q))
    }

    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        x.row_iter().map(|q| self.predict_one(q)).collect()
    }

    /// Class distribution of the side each row falls on.
    pub fn predict_proba(&self, x: &Matrix) -> Matrix {
        let k = self.left.len();
        let mut out = Matrix::zeros(x.rows(), k);
        for (i, q) in x.row_iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.side(q));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Brute-force weighted error of every (feature, threshold, left, right)
    /// assignment, thresholds taken from the midpoint set plus -inf.
    fn oracle_min_error(x: &Matrix, y: &[usize], k: usize, w: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for j in 0..x.cols() {
            let mut vals = x.col_values(j);
            vals.sort_by(|a, b| a.total_cmp(b));
            vals.dedup();
            let mut ths = vec![f64::NEG_INFINITY];
            ths.extend(vals.windows(2).map(|p| 0.5 * (p[0] + p[1])));
            for &t in &ths {
                for lc in 0..k {
                    for rc in 0..k {
                        let e: f64 = (0..x.rows())
                            .filter(|&i| {
                                let pred = if x[(i, j)] <= t { lc } else { rc };
                                pred != y[i]
                            })
                            .map(|i| w[i])
                            .sum();
                        best = best.min(e);
                    }
                }
            }
        }
        best / w.iter().sum::<f64>()
    }

    #[test]
    fn separable_1d_splits_at_midpoint() {
        let x = Matrix::column(&[0.0, 1.0, 2.0, 3.0]);
        let s = DecisionStump::fit(&x, &[0, 0, 1, 1], 2, None);
        assert_eq!(s.feature, Some(0));
        assert_eq!(s.threshold, 1.5);
        assert_eq!(s.weighted_error, 0.0);
    }

    #[test]
    fn single_label_gives_constant_stump() {
        let x = Matrix::column(&[0.0, 1.0, 2.0]);
        let s = DecisionStump::fit(&x, &[1, 1, 1], 2, None);
        assert_eq!(s.feature, None);
        assert_eq!(s.weighted_error, 0.0);
        assert_eq!(s.predict(&x), vec![1, 1, 1]);
    }

    #[test]
    fn heavy_weight_on_mislabeled_point_flips_the_stump() {
        let x = Matrix::column(&[0.0, 1.0, 2.0, 3.0]);
        let y = [0, 0, 0, 1];
        let uniform = DecisionStump::fit(&x, &y, 2, None);
        assert_eq!(uniform.threshold, 2.5);
        // index 0 now carries almost all weight and is labeled 1
        let y2 = [1, 0, 0, 1];
        let w = [0.97, 0.01, 0.01, 0.01];
        let s = DecisionStump::fit(&x, &y2, 2, Some(&w));
        assert_eq!(s.predict_one(&[0.0]), 1);
        let expected = oracle_min_error(&x, &y2, 2, &w);
        assert!((s.weighted_error - expected).abs() < 1e-12);
        assert_eq!(s.threshold, 0.5);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = crate::rng::Rng::new(5);
        for _ in 0..30 {
            let n = 12;
            let mut x = Matrix::zeros(n, 2);
            for v in x.as_mut_slice() {
                *v = (rng.below(6)) as f64;
            }
            let y: Vec<usize> = (0..n).map(|_| rng.below(3)).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.01).collect();
            let s = DecisionStump::fit(&x, &y, 3, Some(&w));
            let expected = oracle_min_error(&x, &y, 3, &w);
            assert!((s.weighted_error - expected).abs() < 1e-12);
        }
    }
}
