//! Scalar helpers routed through `libm` so results do not depend on the
//! platform's libc.

pub use libm::{ceil, cos, exp, fabs as abs, floor, log as ln, pow, round, sin, sqrt};

pub const PI: f64 = core::f64::consts::PI;

/// `ln(Σ exp(v))` without overflow. Returns `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| exp(v - max)).sum();
    max + ln(sum)
}

/// Index of the largest value; the lowest index wins exact ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `Σ |a_i - b_i|^p`, the Minkowski distance raised to the power `p`.
/// Monotone in the true distance, so it is what neighbor searches compare.
pub fn minkowski_pow(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        return squared_distance(a, b);
    }
    if p == 1.0 {
        return a.iter().zip(b).map(|(x, y)| abs(x - y)).sum();
    }
    a.iter().zip(b).map(|(x, y)| pow(abs(x - y), p)).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population variance.
pub fn variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Softmax of one row, computed in place.
pub fn softmax_in_place(row: &mut [f64]) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in row.iter_mut() {
        *v = exp(*v - max);
        sum += *v;
    }
    for v in row.iter_mut() {
        *v /= sum;
    }
}
