use alloc::vec::Vec;

use crate::base::{BaseClassifier, BaseLearnerSpec};
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Two disjoint, nonempty feature-index lists that together cover every
/// column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewSplit {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

impl ViewSplit {
    pub fn new(first: Vec<usize>, second: Vec<usize>, n_features: usize) -> Result<Self> {
        if first.is_empty() || second.is_empty() {
            return Err(Error::invalid("views", "both views need at least one feature"));
        }
        let mut seen = alloc::vec![false; n_features];
        for &j in first.iter().chain(&second) {
            if j >= n_features {
                return Err(Error::invalid("views", alloc::format!("feature {j} out of range")));
            }
            if seen[j] {
                return Err(Error::invalid("views", alloc::format!("feature {j} listed twice")));
            }
            seen[j] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("views", "views must cover every feature"));
        }
        Ok(Self { first, second })
    }

    /// Random half split: a shuffled column order cut at `d / 2`.
    pub fn random(n_features: usize, rng: &mut Rng) -> Result<Self> {
        if n_features < 2 {
            return Err(Error::InvalidData(
                "co-training needs at least two features to form views".into(),
            ));
        }
        let perm = rng.permutation(n_features);
        let mut first = perm[..n_features / 2].to_vec();
        let mut second = perm[n_features / 2..].to_vec();
        first.sort_unstable();
        second.sort_unstable();
        Ok(Self { first, second })
    }

    fn view(&self, v: usize) -> &[usize] {
        if v == 0 {
            &self.first
        } else {
            &self.second
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoTrainingConfig {
    /// Picks per round from class 1 (binary) or from every class (multiclass).
    pub p: usize,
    /// Picks per round from class 0 (binary only).
    pub n: usize,
    pub pool: usize,
    pub rounds: usize,
    pub seed: u64,
    pub views: Option<ViewSplit>,
}

impl Default for CoTrainingConfig {
    fn default() -> Self {
        Self {
            p: 1,
            n: 3,
            pool: 75,
            rounds: 30,
            seed: 0,
            views: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoTrainingModel {
    pub views: ViewSplit,
    learners: [BaseClassifier; 2],
    n_classes: usize,
    pub rounds_run: usize,
    /// Unlabeled indices handed to the other learner, in order.
    pub added: Vec<usize>,
}

impl CoTrainingModel {
    /// Normalized product of both learners' probabilities; uniform when
    /// the product vanishes.
    pub fn predict_proba(&self, x: &Matrix) -> Matrix {
        let a = self.learners[0].predict_proba(&x.select_cols(&self.views.first));
        let b = self.learners[1].predict_proba(&x.select_cols(&self.views.second));
        let mut out = Matrix::zeros(x.rows(), self.n_classes);
        for i in 0..x.rows() {
            let row = out.row_mut(i);
            for (c, o) in row.iter_mut().enumerate() {
                *o = a[(i, c)] * b[(i, c)];
            }
            let s: f64 = row.iter().sum();
            for o in row.iter_mut() {
                *o = if s > 0.0 { *o / s } else { 1.0 / self.n_classes as f64 };
            }
        }
        out
    }
}

/// Pool positions to label: the most confident predictions of each class,
/// with `quota[c]` picks for class `c`, skipping positions in `taken`.
fn pick(proba: &Matrix, quota: &[usize], taken: &[bool]) -> Vec<(usize, usize)> {
    let mut picks = Vec::new();
    for (c, &q) in quota.iter().enumerate() {
        let mut cand: Vec<(usize, f64)> = proba
            .row_iter()
            .enumerate()
            .filter(|(i, r)| !taken[*i] && math::argmax(r) == c)
            .map(|(i, r)| (i, r[c]))
            .collect();
        cand.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        picks.extend(cand.into_iter().take(q).map(|(i, _)| (i, c)));
    }
    picks
}

pub fn co_training_fit(d: &TrainingSet, base: &BaseLearnerSpec, cfg: &CoTrainingConfig) -> Result<CoTrainingModel> {
    if !base.supports_proba() {
        return Err(Error::invalid(
            "base",
            alloc::format!("{} does not produce class probabilities", base.kind().name()),
        ));
    }
    let labels = d.class_labels()?;
    let k = d.n_classes();
    let mut rng = Rng::new(cfg.seed);
    let views = match &cfg.views {
        Some(v) => ViewSplit::new(v.first.clone(), v.second.clone(), d.n_features())?,
        None => ViewSplit::random(d.n_features(), &mut rng)?,
    };
    let quota: Vec<usize> = if k == 2 {
        alloc::vec![cfg.n, cfg.p]
    } else {
        alloc::vec![cfg.p; k]
    };

    // Per-learner training sets over full feature rows.
    let mut sets: [(Matrix, Vec<usize>); 2] = [
        (d.x.clone(), labels.to_vec()),
        (d.x.clone(), labels.to_vec()),
    ];
    let fit = |set: &(Matrix, Vec<usize>), v: usize| {
        base.fit(&set.0.select_cols(views.view(v)), &set.1, k, None)
    };

    let u = d.n_unlabeled();
    let mut order = rng.permutation(u);
    order.reverse();
    let mut pool: Vec<usize> = Vec::new();
    let refill = |pool: &mut Vec<usize>, order: &mut Vec<usize>| {
        while pool.len() < cfg.pool {
            match order.pop() {
                Some(i) => pool.push(i),
                None => break,
            }
        }
        pool.sort_unstable();
    };
    refill(&mut pool, &mut order);

    let mut added = Vec::new();
    let mut rounds_run = 0;
    while rounds_run < cfg.rounds && !pool.is_empty() {
        rounds_run += 1;
        let learners = [fit(&sets[0], 0)?, fit(&sets[1], 1)?];
        let pool_x = d.unlabeled_x.select_rows(&pool);
        let mut taken = alloc::vec![false; pool.len()];
        let mut any = false;
        for v in 0..2 {
            let proba = learners[v].predict_proba(&pool_x.select_cols(views.view(v)));
            let picks = pick(&proba, &quota, &taken);
            for (pos, c) in picks {
                taken[pos] = true;
                any = true;
                let other = &mut sets[1 - v];
                other.0.push_row(pool_x.row(pos));
                other.1.push(c);
                added.push(pool[pos]);
            }
        }
        if !any {
            break;
        }
        let mut kept = Vec::with_capacity(pool.len());
        for (pos, &i) in pool.iter().enumerate() {
            if !taken[pos] {
                kept.push(i);
            }
        }
        pool = kept;
        refill(&mut pool, &mut order);
    }

    let learners = [fit(&sets[0], 0)?, fit(&sets[1], 1)?];
    Ok(CoTrainingModel {
        views,
        learners,
        n_classes: k,
        rounds_run,
        added,
    })
}
