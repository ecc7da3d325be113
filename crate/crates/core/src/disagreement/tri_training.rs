use alloc::vec::Vec;

use crate::base::{BaseClassifier, BaseLearnerSpec};
use crate::dataset::TrainingSet;
use crate::error::Result;
use crate::math;
use crate::matrix::Matrix;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriTrainingConfig {
    pub seed: u64,
    /// Safety cap on update rounds.
    pub max_rounds: usize,
}

impl Default for TriTrainingConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_rounds: 100,
        }
    }
}

/// Outcome of the size/error bookkeeping for one learner in one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriDecision {
    Skip,
    /// Use every candidate.
    Accept,
    /// Use a random subset of this size.
    Subsample(usize),
}

/// The per-learner update rule. Returns the decision together with the
/// (possibly initialized) previous set size.
pub fn tri_decide(e_t: f64, e_prev: f64, l_prev: usize, candidates: usize) -> (TriDecision, usize) {
    if !(e_t < e_prev) {
        return (TriDecision::Skip, l_prev);
    }
    let l_prev = if l_prev == 0 {
        math::floor(e_t / (e_prev - e_t)) as usize + 1
    } else {
        l_prev
    };
    if candidates <= l_prev {
        return (TriDecision::Skip, l_prev);
    }
    let bound = e_prev * l_prev as f64;
    if e_t * (candidates as f64) < bound {
        return (TriDecision::Accept, l_prev);
    }
    let size = math::ceil(bound / e_t - 1.0);
    if size >= (l_prev + 1) as f64 {
        (TriDecision::Subsample(size as usize), l_prev)
    } else {
        (TriDecision::Skip, l_prev)
    }
}

/// One accepted update, kept so callers can check `e_t·l_t < e_prev·l_prev`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriUpdate {
    pub round: usize,
    pub learner: usize,
    pub e_t: f64,
    pub l_t: usize,
    pub e_prev: f64,
    pub l_prev: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriTrainingModel {
    learners: [BaseClassifier; 3],
    n_classes: usize,
    pub updates: Vec<TriUpdate>,
    pub rounds: usize,
    /// False when `max_rounds` stopped the loop.
    pub converged: bool,
}

impl TriTrainingModel {
    /// Vote fractions per class.
    pub fn predict_votes(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), self.n_classes);
        for h in &self.learners {
            for (i, c) in h.predict(x).into_iter().enumerate() {
                out[(i, c)] += 1.0 / 3.0;
            }
        }
        out
    }
}

/// Joint error of a learner pair on the labeled set: among points where both
/// agree, the fraction they get wrong. Floored at 1e-10; 1 when they never
/// agree.
fn pair_error(a: &[usize], b: &[usize], y: &[usize]) -> f64 {
    let mut agree = 0usize;
    let mut wrong = 0usize;
    for ((&p, &q), &t) in a.iter().zip(b).zip(y) {
        if p == q {
            agree += 1;
            if p != t {
                wrong += 1;
            }
        }
    }
    if agree == 0 {
        return 1.0;
    }
    (wrong as f64 / agree as f64).max(1e-10)
}

pub fn tri_training_fit(d: &TrainingSet, base: &BaseLearnerSpec, cfg: TriTrainingConfig) -> Result<TriTrainingModel> {
    let labels = d.class_labels()?;
    let k = d.n_classes();
    let l = d.n_labeled();
    let mut rng = Rng::new(cfg.seed);

    let fit_bootstrap = |rng: &mut Rng| {
        let idx: Vec<usize> = (0..l).map(|_| rng.below(l)).collect();
        let y: Vec<usize> = idx.iter().map(|&i| labels[i]).collect();
        base.fit(&d.x.select_rows(&idx), &y, k, None)
    };
    let mut learners = [
        fit_bootstrap(&mut rng)?,
        fit_bootstrap(&mut rng)?,
        fit_bootstrap(&mut rng)?,
    ];

    let mut e_prev = [0.5; 3];
    let mut l_prev = [0usize; 3];
    let mut updates = Vec::new();
    let mut rounds = 0;
    let mut converged = d.n_unlabeled() == 0;

    while !converged && rounds < cfg.max_rounds {
        rounds += 1;
        let on_lab: Vec<Vec<usize>> = learners.iter().map(|h| h.predict(&d.x)).collect();
        let on_unl: Vec<Vec<usize>> = learners.iter().map(|h| h.predict(&d.unlabeled_x)).collect();
        let mut refits: [Option<(Vec<usize>, Vec<usize>)>; 3] = [None, None, None];
        let mut next = [(e_prev[0], l_prev[0]), (e_prev[1], l_prev[1]), (e_prev[2], l_prev[2])];

        for i in 0..3 {
            let (j, kk) = ((i + 1) % 3, (i + 2) % 3);
            let e_t = pair_error(&on_lab[j], &on_lab[kk], labels);
            let cand: Vec<usize> = (0..d.n_unlabeled())
                .filter(|&u| on_unl[j][u] == on_unl[kk][u])
                .collect();
            let (decision, lp) = tri_decide(e_t, e_prev[i], l_prev[i], cand.len());
            l_prev[i] = lp;
            let chosen = match decision {
                TriDecision::Skip => continue,
                TriDecision::Accept => cand,
                TriDecision::Subsample(s) => {
                    let mut pick: Vec<usize> = rng
                        .sample_without_replacement(cand.len(), s)
                        .into_iter()
                        .map(|p| cand[p])
                        .collect();
                    pick.sort_unstable();
                    pick
                }
            };
            let l_t = chosen.len();
            assert!(
                e_t * (l_t as f64) < e_prev[i] * (lp as f64),
                "tri-training accepted an update that does not shrink e·l"
            );
            updates.push(TriUpdate {
                round: rounds,
                learner: i,
                e_t,
                l_t,
                e_prev: e_prev[i],
                l_prev: lp,
            });
            let pseudo = chosen.iter().map(|&u| on_unl[j][u]).collect();
            refits[i] = Some((chosen, pseudo));
            next[i] = (e_t, l_t);
        }

        if refits.iter().all(Option::is_none) {
            converged = true;
            break;
        }
        for (i, r) in refits.into_iter().enumerate() {
            if let Some((idx, pseudo)) = r {
                let x = d.x.vstack(&d.unlabeled_x.select_rows(&idx))?;
                let mut y = labels.to_vec();
                y.extend_from_slice(&pseudo);
                learners[i] = base.fit(&x, &y, k, None)?;
                e_prev[i] = next[i].0;
                l_prev[i] = next[i].1;
            }
        }
    }

    Ok(TriTrainingModel {
        learners,
        n_classes: k,
        updates,
        rounds,
        converged,
    })
}
