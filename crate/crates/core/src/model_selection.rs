//! K-fold cross-validation with grid and random search.
//!
//! A search is split into a [`SearchPlan`] of independent (candidate, fold)
//! jobs and a reduction, so callers may evaluate the jobs in any order or
//! in parallel and still get the same result.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::dataset::{Labels, SslDataset};
use crate::error::{Error, Result};
use crate::estimator::{fit, EstimatorSpec, FittedModel};
use crate::math;
use crate::metrics::{search_score, Metric};
use crate::params::{ParamMap, ParamValue};
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn folds_from(assign: &[usize], k: usize) -> Vec<Fold> {
    (0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..assign.len()).partition(|&i| assign[i] == f);
            Fold { train, test }
        })
        .collect()
}

/// `k` train/test partitions of `0..n`. With `strata`, each class is dealt
/// round-robin across folds (continuing from where the previous class
/// stopped), so per-class and total fold sizes differ by at most one.
pub fn kfold_split(n: usize, k: usize, strata: Option<&[i64]>, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 || k > n {
        return Err(Error::invalid("k", alloc::format!("need 2 <= k <= n = {n}, got {k}")));
    }
    let mut rng = Rng::new(seed);
    let mut assign = alloc::vec![0usize; n];
    match strata {
        None => {
            let perm = rng.permutation(n);
            let (base, extra) = (n / k, n % k);
            let mut pos = 0;
            for f in 0..k {
                let size = base + usize::from(f < extra);
                for &i in &perm[pos..pos + size] {
                    assign[i] = f;
                }
                pos += size;
            }
        }
        Some(y) => {
            if y.len() != n {
                return Err(Error::dims("stratification label count", n, y.len()));
            }
            let mut classes = y.to_vec();
            classes.sort_unstable();
            classes.dedup();
            let mut slot = 0;
            for c in classes {
                let mut members: Vec<usize> = (0..n).filter(|&i| y[i] == c).collect();
                rng.shuffle(&mut members);
                for i in members {
                    assign[i] = slot % k;
                    slot += 1;
                }
            }
        }
    }
    Ok(folds_from(&assign, k))
}

/// Candidate values per parameter, in declaration order.
pub type ParamGrid = Vec<(String, Vec<ParamValue>)>;

/// Cartesian product of the grid; the first key varies slowest.
pub fn grid_candidates(grid: &[(String, Vec<ParamValue>)]) -> Result<Vec<ParamMap>> {
    let mut out = alloc::vec![ParamMap::new()];
    for (name, values) in grid {
        if values.is_empty() {
            return Err(Error::invalid(name, "grid needs at least one value"));
        }
        let mut next = Vec::with_capacity(out.len() * values.len());
        for partial in &out {
            for v in values {
                let mut m = partial.clone();
                m.set(name, v.clone());
                next.push(m);
            }
        }
        out = next;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Uniform { lo: f64, hi: f64 },
    LogUniform { lo: f64, hi: f64 },
    Choice(Vec<ParamValue>),
}

impl Distribution {
    fn check(&self, name: &str) -> Result<()> {
        match self {
            Distribution::Uniform { lo, hi } if lo < hi => Ok(()),
            Distribution::LogUniform { lo, hi } if *lo > 0.0 && lo < hi => Ok(()),
            Distribution::Choice(v) if !v.is_empty() => Ok(()),
            Distribution::Choice(_) => Err(Error::invalid(name, "choice needs at least one value")),
            _ => Err(Error::invalid(name, "need lo < hi (and lo > 0 for log_uniform)")),
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> ParamValue {
        match self {
            Distribution::Uniform { lo, hi } => ParamValue::Real(rng.uniform_range(*lo, *hi)),
            Distribution::LogUniform { lo, hi } => {
                ParamValue::Real(math::exp(rng.uniform_range(math::ln(*lo), math::ln(*hi))).clamp(*lo, *hi))
            }
            Distribution::Choice(v) => v[rng.below(v.len())].clone(),
        }
    }
}

/// `n_iter` seeded draws; parameters are sampled in declaration order.
pub fn random_candidates(space: &[(String, Distribution)], n_iter: usize, seed: u64) -> Result<Vec<ParamMap>> {
    for (name, d) in space {
        d.check(name)?;
    }
    if n_iter == 0 {
        return Err(Error::invalid("n_iter", "must be >= 1"));
    }
    let mut rng = Rng::new(seed);
    Ok((0..n_iter)
        .map(|_| {
            let mut m = ParamMap::new();
            for (name, d) in space {
                m.set(name, d.sample(&mut rng));
            }
            m
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub metric: Metric,
    pub folds: usize,
    pub stratified: bool,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(metric: Metric) -> Self {
        Self {
            metric,
            folds: 5,
            stratified: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateScore {
    pub params: ParamMap,
    /// Per-fold score; `-inf` when the fit or prediction failed.
    pub fold_scores: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub candidates: Vec<CandidateScore>,
    pub best_index: usize,
    pub best_params: ParamMap,
    pub refit: FittedModel,
    pub warnings: Vec<String>,
}

/// Every (candidate, fold) evaluation of one search.
#[derive(Clone, Debug)]
pub struct SearchPlan {
    base: EstimatorSpec,
    candidates: Vec<ParamMap>,
    data: SslDataset,
    folds: Vec<Fold>,
    config: SearchConfig,
    warnings: Vec<String>,
}

impl SearchPlan {
    pub fn new(base: EstimatorSpec, candidates: Vec<ParamMap>, data: SslDataset, config: SearchConfig) -> Result<Self> {
        if config.metric.task() != base.task() {
            return Err(Error::invalid(
                "metric",
                alloc::format!(
                    "{} does not apply to the {} algorithm {}",
                    config.metric.name(),
                    base.task().as_str(),
                    base.name()
                ),
            ));
        }
        if candidates.is_empty() {
            return Err(Error::invalid("grid", "no candidates to evaluate"));
        }
        let n = data.n_labeled();
        let mut warnings = Vec::new();
        let strata = match (&data.y, config.stratified) {
            (Labels::Class(y), true) => {
                let mut counts: Vec<(i64, usize)> = Vec::new();
                for &c in y {
                    match counts.iter_mut().find(|(k, _)| *k == c) {
                        Some(e) => e.1 += 1,
                        None => counts.push((c, 1)),
                    }
                }
                if counts.iter().all(|&(_, m)| m >= config.folds) {
                    Some(y.as_slice())
                } else {
                    warnings.push(alloc::format!(
                        "a class has fewer than {} labeled samples; using unstratified folds",
                        config.folds
                    ));
                    None
                }
            }
            _ => None,
        };
        let folds = kfold_split(n, config.folds, strata, config.seed)?;
        Ok(Self {
            base,
            candidates,
            data,
            folds,
            config,
            warnings,
        })
    }

    pub fn candidates(&self) -> &[ParamMap] {
        &self.candidates
    }

    pub fn folds(&self) -> &[Fold] {
        &self.folds
    }

    pub fn n_jobs(&self) -> usize {
        self.candidates.len() * self.folds.len()
    }

    /// Score of job `j` = candidate `j / folds`, fold `j % folds`.
    pub fn run_job(&self, j: usize) -> Result<f64> {
        let (c, f) = (j / self.folds.len(), j % self.folds.len());
        let spec = self.base.with_params(&self.candidates[c])?;
        self.score_fold(&spec, &self.folds[f])
    }

    /// Fits on the fold's labeled training rows plus all unlabeled rows,
    /// scores on the held-out labeled rows.
    pub fn score_fold(&self, spec: &EstimatorSpec, fold: &Fold) -> Result<f64> {
        let d = &self.data;
        let train = SslDataset::new(d.x.select_rows(&fold.train), d.y.select(&fold.train), d.unlabeled_x.clone());
        let model = fit(spec, &train, self.config.seed)?;
        let pred = model.predict(&d.x.select_rows(&fold.test))?;
        search_score(self.config.metric, &d.y.select(&fold.test), &pred)
    }

    /// Aggregates job results (indexed as in [`run_job`](Self::run_job)),
    /// picks the best mean (first on ties) and refits it on all data.
    pub fn finish(&self, jobs: Vec<Result<f64>>) -> Result<SearchResult> {
        if jobs.len() != self.n_jobs() {
            return Err(Error::dims("search job count", self.n_jobs(), jobs.len()));
        }
        let k = self.folds.len();
        let mut candidates = Vec::with_capacity(self.candidates.len());
        let mut iter = jobs.into_iter();
        for params in &self.candidates {
            let mut fold_scores = Vec::with_capacity(k);
            let mut error = None;
            for r in iter.by_ref().take(k) {
                match r {
                    Ok(s) if s.is_finite() => fold_scores.push(s),
                    Ok(s) => {
                        fold_scores.push(f64::NEG_INFINITY);
                        error.get_or_insert_with(|| alloc::format!("non-finite score {s}"));
                    }
                    Err(e) => {
                        fold_scores.push(f64::NEG_INFINITY);
                        error.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            let (mean, std) = if error.is_some() {
                (f64::NEG_INFINITY, f64::NAN)
            } else {
                let m = math::mean(&fold_scores);
                (m, math::sqrt(math::variance(&fold_scores)))
            };
            candidates.push(CandidateScore {
                params: params.clone(),
                fold_scores,
                mean,
                std,
                error,
            });
        }
        let mut best: Option<usize> = None;
        for (i, c) in candidates.iter().enumerate() {
            if c.mean > f64::NEG_INFINITY && best.map_or(true, |b| c.mean > candidates[b].mean) {
                best = Some(i);
            }
        }
        let best_index = best.ok_or_else(|| {
            Error::Numerical(alloc::format!(
                "every candidate failed; first error: {}",
                candidates[0].error.as_deref().unwrap_or("unknown")
            ))
        })?;
        let best_params = candidates[best_index].params.clone();
        let refit = fit(&self.base.with_params(&best_params)?, &self.data, self.config.seed)?;
        Ok(SearchResult {
            candidates,
            best_index,
            best_params,
            refit,
            warnings: self.warnings.clone(),
        })
    }

    /// Evaluates every job in order on the current thread.
    pub fn run_serial(&self) -> Result<SearchResult> {
        let jobs = (0..self.n_jobs()).map(|j| self.run_job(j)).collect();
        self.finish(jobs)
    }
}

/// Exhaustive search over `grid` on top of `base`'s parameters.
pub fn grid_search_fit(
    base: &EstimatorSpec,
    grid: &[(String, Vec<ParamValue>)],
    d: &SslDataset,
    config: SearchConfig,
) -> Result<SearchResult> {
    SearchPlan::new(base.clone(), grid_candidates(grid)?, d.clone(), config)?.run_serial()
}

/// `n_iter` random draws from `space`; draws use `config.seed`.
pub fn random_search_fit(
    base: &EstimatorSpec,
    space: &[(String, Distribution)],
    n_iter: usize,
    d: &SslDataset,
    config: SearchConfig,
) -> Result<SearchResult> {
    let cands = random_candidates(space, n_iter, config.seed)?;
    SearchPlan::new(base.clone(), cands, d.clone(), config)?.run_serial()
}
