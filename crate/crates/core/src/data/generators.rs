//! Synthetic datasets. Every generator is a pure function of its arguments.

use alloc::vec::Vec;

use crate::dataset::Labels;
use crate::math;
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Two interleaving unit half-circles.
///
/// Class 0 holds `n / 2` points `(cos t, sin t)` and class 1 holds the
/// remaining points `(1 - cos t, 0.5 - sin t)`, with `t` evenly spaced over
/// `[0, π]` in each moon. Rows are ordered class 0 first. Noise is added
/// per coordinate, x before y, in row order.
pub fn gen_two_moons(n: usize, noise_sd: f64, seed: u64) -> (Matrix, Labels) {
    let n0 = n / 2;
    let n1 = n - n0;
    let mut rng = Rng::new(seed);
    let mut x = Matrix::zeros(n, 2);
    let mut y = Vec::with_capacity(n);
    let angle = |i: usize, m: usize| {
        if m > 1 {
            math::PI * i as f64 / (m - 1) as f64
        } else {
            0.0
        }
    };
    for i in 0..n0 {
        let t = angle(i, n0);
        x[(i, 0)] = math::cos(t);
        x[(i, 1)] = math::sin(t);
        y.push(0);
    }
    for i in 0..n1 {
        let t = angle(i, n1);
        x[(n0 + i, 0)] = 1.0 - math::cos(t);
        x[(n0 + i, 1)] = 0.5 - math::sin(t);
        y.push(1);
    }
    if noise_sd > 0.0 {
        for v in x.as_mut_slice() {
            *v += noise_sd * rng.normal();
        }
    }
    (x, Labels::Class(y))
}

/// Center of blob `c` on a square lattice with spacing 10.
pub fn blob_center(c: usize, k: usize) -> [f64; 2] {
    let side = (1..).find(|s| s * s >= k).unwrap_or(1);
    [10.0 * (c % side) as f64, 10.0 * (c / side) as f64]
}

/// `k` isotropic Gaussian blobs in 2-D. Class `c` gets a contiguous block of
/// rows; the first `n % k` classes get one extra row.
pub fn gen_blobs(n: usize, k: usize, sd: f64, seed: u64) -> (Matrix, Labels) {
    let k = k.max(1);
    let mut rng = Rng::new(seed);
    let mut x = Matrix::zeros(n, 2);
    let mut y = Vec::with_capacity(n);
    let base = n / k;
    let extra = n % k;
    let mut row = 0;
    for c in 0..k {
        let count = base + usize::from(c < extra);
        let center = blob_center(c, k);
        for _ in 0..count {
            x[(row, 0)] = center[0];
            x[(row, 1)] = center[1];
            y.push(c as i64);
            row += 1;
        }
    }
    if sd > 0.0 {
        for v in x.as_mut_slice() {
            *v += sd * rng.normal();
        }
    }
    (x, Labels::Class(y))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearData {
    pub x: Matrix,
    pub y: Labels,
    pub weights: Vec<f64>,
}

/// `y = w·x + ε` with `w ~ N(0, 1)^d` drawn first, then rows of
/// `x ~ U(-1, 1)^d`, then the noise terms.
pub fn gen_linear(n: usize, d: usize, noise_sd: f64, seed: u64) -> LinearData {
    let d = d.max(1);
    let mut rng = Rng::new(seed);
    let weights: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
    let mut x = Matrix::zeros(n, d);
    for v in x.as_mut_slice() {
        *v = rng.uniform_range(-1.0, 1.0);
    }
    let mut y: Vec<f64> = x.row_iter().map(|r| math::dot(r, &weights)).collect();
    if noise_sd > 0.0 {
        for v in &mut y {
            *v += noise_sd * rng.normal();
        }
    }
    LinearData {
        x,
        y: Labels::Real(y),
        weights,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moon_zero_starts_at_angle_zero() {
        let (x, _) = gen_two_moons(10, 0.0, 0);
        assert_eq!(x.row(0), &[1.0, 0.0]);
        // end of moon 0 is (cos π, sin π)
        assert!((x[(4, 0)] + 1.0).abs() < 1e-15);
        assert!(x[(4, 1)].abs() < 1e-15);
        // moon 1 starts at (1 - 1, 0.5 - 0)
        assert_eq!(x.row(5), &[0.0, 0.5]);
    }

    #[test]
    fn four_points_balanced() {
        let (_, y) = gen_two_moons(4, 0.3, 2);
        assert_eq!(y, Labels::Class(alloc::vec![0, 0, 1, 1]));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_two_moons(50, 0.1, 9), gen_two_moons(50, 0.1, 9));
        assert_ne!(gen_two_moons(50, 0.1, 9).0, gen_two_moons(50, 0.1, 10).0);
        assert_eq!(gen_blobs(30, 3, 1.0, 1), gen_blobs(30, 3, 1.0, 1));
        assert_eq!(gen_linear(20, 3, 0.1, 5), gen_linear(20, 3, 0.1, 5));
    }

    #[test]
    fn zero_sd_blobs_sit_on_centers() {
        let (x, y) = gen_blobs(12, 4, 0.0, 0);
        let y = y.as_class().unwrap();
        for i in 0..12 {
            let c = blob_center(y[i] as usize, 4);
            assert_eq!(x.row(i), &c);
        }
        let (_, y1) = gen_blobs(5, 1, 2.0, 0);
        assert!(y1.as_class().unwrap().iter().all(|&c| c == 0));
    }

    #[test]
    fn noiseless_linear_is_exact() {
        let data = gen_linear(40, 3, 0.0, 11);
        let y = data.y.as_real().unwrap();
        let mean = math::mean(y);
        let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
        let ss_res: f64 = data
            .x
            .row_iter()
            .zip(y)
            .map(|(r, t)| {
                let e = math::dot(r, &data.weights) - t;
                e * e
            })
            .sum();
        assert_eq!(1.0 - ss_res / ss_tot, 1.0);
    }
}
