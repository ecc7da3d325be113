//! Co-training regression with two kNN regressors that differ in their
//! Minkowski order.

use alloc::vec::Vec;

use crate::base::{knn::nearest, KnnConfig, KnnRegressor};
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoRegConfig {
    pub k1: usize,
    pub k2: usize,
    pub p1: f64,
    pub p2: f64,
    pub rounds: usize,
    pub pool: usize,
    pub seed: u64,
}

impl Default for CoRegConfig {
    fn default() -> Self {
        Self {
            k1: 3,
            k2: 3,
            p1: 2.0,
            p2: 5.0,
            rounds: 100,
            pool: 100,
            seed: 0,
        }
    }
}

/// A point one regressor labeled for its companion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoRegPick {
    pub round: usize,
    /// The regressor that labeled the point; it went to the other pool.
    pub by: usize,
    pub index: usize,
    pub value: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoRegModel {
    regressors: [KnnRegressor; 2],
    pub picks: Vec<CoRegPick>,
    pub rounds_run: usize,
}

impl CoRegModel {
    pub fn regressor(&self, i: usize) -> &KnnRegressor {
        &self.regressors[i]
    }

    /// Mean of the two regressors.
    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        let a = self.regressors[0].predict(x);
        let b = self.regressors[1].predict(x);
        a.iter().zip(&b).map(|(p, q)| (p + q) / 2.0).collect()
    }
}

/// Reduction in squared error on the labeled neighbors of `q` after adding
/// `(q, y_hat)` to the regressor's pool.
pub fn coreg_delta(reg: &KnnRegressor, q: &[f64], y_hat: f64) -> Result<f64> {
    let cfg = *reg.config();
    let mut x = reg.train_x().clone();
    x.push_row(q);
    let mut y = reg.train_y().to_vec();
    y.push(y_hat);
    let augmented = KnnRegressor::fit(&x, &y, cfg)?;
    let mut delta = 0.0;
    for (i, _) in nearest(reg.train_x(), q, cfg.k, cfg.p) {
        let xi = reg.train_x().row(i);
        let yi = reg.train_y()[i];
        let before = yi - reg.predict_one(xi);
        let after = yi - augmented.predict_one(xi);
        delta += before * before - after * after;
    }
    Ok(delta)
}

pub fn coreg_fit(d: &TrainingSet, cfg: CoRegConfig) -> Result<CoRegModel> {
    let y = d.real_targets()?;
    let l = d.n_labeled();
    let need = cfg.k1.max(cfg.k2) + 1;
    if l < need {
        return Err(Error::InvalidData(alloc::format!(
            "CoReg needs at least {need} labeled rows, got {l}"
        )));
    }
    let cfgs = [
        KnnConfig {
            k: cfg.k1,
            p: cfg.p1,
            weighted: false,
        },
        KnnConfig {
            k: cfg.k2,
            p: cfg.p2,
            weighted: false,
        },
    ];
    let mut pools: [(Matrix, Vec<f64>); 2] = [(d.x.clone(), y.to_vec()), (d.x.clone(), y.to_vec())];
    let mut regs = [
        KnnRegressor::fit(&pools[0].0, &pools[0].1, cfgs[0])?,
        KnnRegressor::fit(&pools[1].0, &pools[1].1, cfgs[1])?,
    ];
    let mut remaining: Vec<usize> = (0..d.n_unlabeled()).collect();
    let mut rng = Rng::new(cfg.seed);
    let mut picks = Vec::new();
    let mut rounds_run = 0;

    while rounds_run < cfg.rounds && !remaining.is_empty() {
        rounds_run += 1;
        let mut chosen: [Option<CoRegPick>; 2] = [None, None];
        for r in 0..2 {
            let mut cand: Vec<usize> = rng
                .sample_without_replacement(remaining.len(), cfg.pool)
                .into_iter()
                .map(|p| remaining[p])
                .collect();
            cand.sort_unstable();
            let mut best: Option<CoRegPick> = None;
            for u in cand {
                let q = d.unlabeled_x.row(u);
                let y_hat = regs[r].predict_one(q);
                let delta = coreg_delta(&regs[r], q, y_hat)?;
                if delta > 0.0 && best.map_or(true, |b| delta > b.delta) {
                    best = Some(CoRegPick {
                        round: rounds_run,
                        by: r,
                        index: u,
                        value: y_hat,
                        delta,
                    });
                }
            }
            if let Some(p) = best {
                remaining.retain(|&i| i != p.index);
                chosen[r] = Some(p);
            }
        }
        if chosen.iter().all(Option::is_none) {
            break;
        }
        for p in chosen.into_iter().flatten() {
            assert!(p.delta > 0.0);
            let other = 1 - p.by;
            pools[other].0.push_row(d.unlabeled_x.row(p.index));
            pools[other].1.push(p.value);
            regs[other] = KnnRegressor::fit(&pools[other].0, &pools[other].1, cfgs[other])?;
            picks.push(p);
        }
    }

    Ok(CoRegModel {
        regressors: regs,
        picks,
        rounds_run,
    })
}
