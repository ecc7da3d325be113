use alloc::vec::Vec;

use super::linear::{linear_svm_fit, primal_objective, LinearSvmConfig, LinearSvmModel};
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TsvmConfig {
    pub c_l: f64,
    pub c_u: f64,
    /// Fraction of unlabeled points pseudo-labeled positive at the start.
    /// Defaults to the labeled positive fraction.
    pub pos_fraction: Option<f64>,
    pub solver: LinearSvmConfig,
}

impl Default for TsvmConfig {
    fn default() -> Self {
        Self {
            c_l: 1.0,
            c_u: 0.1,
            pos_fraction: None,
            solver: LinearSvmConfig::default(),
        }
    }
}

/// One accepted label swap, with the objective at the same `w`, `b` before
/// and after flipping the two pseudo-labels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapRecord {
    pub pos: usize,
    pub neg: usize,
    pub c_u: f64,
    pub objective_before: f64,
    pub objective_after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TsvmModel {
    pub svm: LinearSvmModel,
    /// Final pseudo-labels (±1) of the unlabeled points.
    pub pseudo: Vec<f64>,
    pub initial_positives: usize,
    pub swaps: Vec<SwapRecord>,
    /// True when every inner solve converged.
    pub converged: bool,
}

fn to_sign(c: usize) -> f64 {
    if c == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Largest slack among unlabeled points carrying pseudo-label `sign`.
fn max_slack(slack: &[f64], pseudo: &[f64], sign: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (&s, &p)) in slack.iter().zip(pseudo).enumerate() {
        if p == sign && s > 0.0 && best.map_or(true, |(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best
}

/// Transductive SVM by pseudo-label switching with a doubling unlabeled cost.
pub fn tsvm_fit(d: &TrainingSet, cfg: TsvmConfig) -> Result<TsvmModel> {
    let labels = d.class_labels()?;
    if d.n_classes() != 2 {
        return Err(Error::Unsupported(
            "TSVM is binary only; wrap with one-vs-rest out of scope".into(),
        ));
    }
    let l = d.n_labeled();
    let u = d.n_unlabeled();
    if u == 0 {
        return Err(Error::InvalidData("TSVM needs at least one unlabeled sample".into()));
    }
    if !(cfg.c_l > 0.0) || !(cfg.c_u > 0.0) {
        return Err(Error::invalid("C", "C_l and C_u must be > 0"));
    }
    let y_l: Vec<f64> = labels.iter().map(|&c| to_sign(c)).collect();
    let pos_fraction = match cfg.pos_fraction {
        Some(f) if (0.0..=1.0).contains(&f) => f,
        Some(_) => return Err(Error::invalid("pos_fraction", "must lie in [0, 1]")),
        None => y_l.iter().filter(|&&v| v > 0.0).count() as f64 / l as f64,
    };

    let supervised = linear_svm_fit(&d.x, &y_l, &alloc::vec![cfg.c_l; l], cfg.solver)?;
    let scores = supervised.decision_function(&d.unlabeled_x);
    let mut order: Vec<usize> = (0..u).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let n_pos = math::round(pos_fraction * u as f64) as usize;
    let mut pseudo = alloc::vec![-1.0; u];
    for &i in &order[..n_pos] {
        pseudo[i] = 1.0;
    }

    let x_all = d.all_x();
    let swap_limit = 10 * u + 100;
    let mut converged = supervised.converged;
    let mut swaps = Vec::new();
    let mut c_star = (1e-5f64).max(1e-5 * cfg.c_u).min(cfg.c_u);

    let build = |pseudo: &[f64], c_star: f64| {
        let mut y = y_l.clone();
        y.extend_from_slice(pseudo);
        let mut c = alloc::vec![cfg.c_l; l];
        c.extend(core::iter::repeat(c_star).take(u));
        (y, c)
    };

    let mut model;
    loop {
        let (y, c) = build(&pseudo, c_star);
        model = linear_svm_fit(&x_all, &y, &c, cfg.solver)?;
        converged &= model.converged;
        let mut level_swaps = 0;
        loop {
            let slack: Vec<f64> = d
                .unlabeled_x
                .row_iter()
                .zip(&pseudo)
                .map(|(r, &p)| (1.0 - p * model.decision(r)).max(0.0))
                .collect();
            let (Some((i, si)), Some((j, sj))) =
                (max_slack(&slack, &pseudo, 1.0), max_slack(&slack, &pseudo, -1.0))
            else {
                break;
            };
            if si + sj <= 2.0 {
                break;
            }
            let (y, c) = build(&pseudo, c_star);
            let before = primal_objective(&model.w, model.b, &x_all, &y, &c);
            pseudo[i] = -1.0;
            pseudo[j] = 1.0;
            let (y, c) = build(&pseudo, c_star);
            let after = primal_objective(&model.w, model.b, &x_all, &y, &c);
            if !(after < before) {
                return Err(Error::Numerical(alloc::format!(
                    "label swap did not decrease the objective ({before} -> {after})"
                )));
            }
            swaps.push(SwapRecord {
                pos: i,
                neg: j,
                c_u: c_star,
                objective_before: before,
                objective_after: after,
            });
            level_swaps += 1;
            if level_swaps > swap_limit {
                return Err(Error::Numerical("TSVM label switching did not settle".into()));
            }
            model = linear_svm_fit(&x_all, &y, &c, cfg.solver)?;
            converged &= model.converged;
        }
        if c_star >= cfg.c_u {
            break;
        }
        c_star = (2.0 * c_star).min(cfg.c_u);
    }

    Ok(TsvmModel {
        svm: model,
        pseudo,
        initial_positives: n_pos,
        swaps,
        converged,
    })
}
