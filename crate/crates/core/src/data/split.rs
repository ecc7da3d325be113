use alloc::format;
use alloc::vec::Vec;

use crate::dataset::{Labels, SslDataset};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::Rng;

/// A labeled/unlabeled partition of a fully labeled sample. The labels of the
/// unlabeled part are kept aside for evaluation only.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub dataset: SslDataset,
    pub labeled_idx: Vec<usize>,
    pub unlabeled_idx: Vec<usize>,
    pub unlabeled_y: Labels,
}

/// Picks `n_labeled` rows to keep labeled; the rest become unlabeled.
///
/// With `stratified`, per-class counts follow a largest-remainder allocation
/// of `n_labeled` proportional to class sizes, then any class left at zero
/// borrows one slot from the class with the largest surplus.
pub fn split_labeled_unlabeled(
    x: &Matrix,
    y: &Labels,
    n_labeled: usize,
    stratified: bool,
    seed: u64,
) -> Result<Split> {
    let n = x.rows();
    if y.len() != n {
        return Err(Error::dims("label count", n, y.len()));
    }
    if n_labeled == 0 || n_labeled > n {
        return Err(Error::invalid(
            "n_labeled",
            format!("must lie in 1..={n}, got {n_labeled}"),
        ));
    }
    let mut rng = Rng::new(seed);

    let mut labeled_idx = if stratified {
        let raw = y
            .as_class()
            .ok_or_else(|| Error::invalid("stratified", "requires class labels"))?;
        stratified_pick(raw, n_labeled, &mut rng)?
    } else {
        let mut perm = rng.permutation(n);
        perm.truncate(n_labeled);
        perm
    };
    labeled_idx.sort_unstable();

    let mut is_labeled = alloc::vec![false; n];
    for &i in &labeled_idx {
        is_labeled[i] = true;
    }
    let unlabeled_idx: Vec<usize> = (0..n).filter(|&i| !is_labeled[i]).collect();

    let dataset = SslDataset::new(
        x.select_rows(&labeled_idx),
        y.select(&labeled_idx),
        x.select_rows(&unlabeled_idx),
    );
    Ok(Split {
        dataset,
        unlabeled_y: y.select(&unlabeled_idx),
        labeled_idx,
        unlabeled_idx,
    })
}

fn stratified_pick(raw: &[i64], n_labeled: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    let n = raw.len();
    let mut classes = raw.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let k = classes.len();
    if n_labeled < k {
        return Err(Error::invalid(
            "n_labeled",
            format!("stratification needs at least one sample per class ({k} classes), got {n_labeled}"),
        ));
    }
    let members: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| (0..n).filter(|&i| raw[i] == *c).collect())
        .collect();
    let quota: Vec<f64> = members
        .iter()
        .map(|m| n_labeled as f64 * m.len() as f64 / n as f64)
        .collect();
    let mut alloc: Vec<usize> = quota.iter().map(|&q| math::floor(q) as usize).collect();
    let mut remaining = n_labeled - alloc.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let fa = quota[a] - math::floor(quota[a]);
        let fb = quota[b] - math::floor(quota[b]);
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &c in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        if alloc[c] < members[c].len() {
            alloc[c] += 1;
            remaining -= 1;
        }
    }
    while let Some(empty) = (0..k).find(|&c| alloc[c] == 0) {
        let donor = (0..k)
            .filter(|&c| alloc[c] > 1)
            .max_by(|&a, &b| {
                let sa = alloc[a] as f64 - quota[a];
                let sb = alloc[b] as f64 - quota[b];
                sa.total_cmp(&sb).then(b.cmp(&a))
            })
            .ok_or_else(|| Error::invalid("n_labeled", "stratification infeasible"))?;
        alloc[donor] -= 1;
        alloc[empty] += 1;
    }

    let mut picked = Vec::with_capacity(n_labeled);
    for (c, m) in members.iter().enumerate() {
        let mut m = m.clone();
        rng.shuffle(&mut m);
        picked.extend_from_slice(&m[..alloc[c]]);
    }
    Ok(picked)
}
