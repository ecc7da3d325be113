use alloc::vec::Vec;

use super::{check_binary, class_of, sign_of, BoostEnsemble, ALPHA_CAP};
use crate::base::BaseLearnerSpec;
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::graph::default_gamma;
use crate::math;
use crate::matrix::Matrix;
use crate::svm::rbf_gram;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiBoostConfig {
    pub rounds: usize,
    /// Weight of the unlabeled-unlabeled similarity terms.
    pub c: f64,
    pub sample_fraction: f64,
    /// RBF width; `None` uses the graph default.
    pub gamma: Option<f64>,
}

impl Default for SemiBoostConfig {
    fn default() -> Self {
        Self {
            rounds: 20,
            c: 1.0,
            sample_fraction: 0.1,
            gamma: None,
        }
    }
}

/// `p_i` and `q_i` for every unlabeled point given the current scores.
/// `s` is the similarity over labeled rows followed by unlabeled rows and
/// `h_u` holds `H` on the unlabeled rows.
pub fn semiboost_pq(s: &Matrix, labels: &[usize], h_u: &[f64], c: f64) -> (Vec<f64>, Vec<f64>) {
    let l = labels.len();
    let u = h_u.len();
    let mut p = alloc::vec![0.0; u];
    let mut q = alloc::vec![0.0; u];
    for i in 0..u {
        let row = s.row(l + i);
        let hi = h_u[i];
        let (mut pos, mut neg) = (0.0, 0.0);
        for (j, &y) in labels.iter().enumerate() {
            if y == 1 {
                pos += row[j];
            } else {
                neg += row[j];
            }
        }
        let (mut up, mut uq) = (0.0, 0.0);
        for (j, &hj) in h_u.iter().enumerate() {
            let sij = row[l + j];
            up += sij * math::exp(hj - hi);
            uq += sij * math::exp(hi - hj);
        }
        p[i] = pos * math::exp(-2.0 * hi) + 0.5 * c * up;
        q[i] = neg * math::exp(2.0 * hi) + 0.5 * c * uq;
    }
    (p, q)
}

/// Similarity-guided boosting. Each round pseudo-labels the most confident
/// unlabeled points by `sign(p − q)` and fits the base learner on them plus
/// the labeled set.
pub fn semiboost_fit(d: &TrainingSet, base: &BaseLearnerSpec, cfg: SemiBoostConfig) -> Result<BoostEnsemble> {
    check_binary(d, "semiboost", base)?;
    if !(cfg.sample_fraction > 0.0 && cfg.sample_fraction <= 1.0) {
        return Err(Error::invalid("sample_fraction", "must lie in (0, 1]"));
    }
    if !(cfg.c >= 0.0) {
        return Err(Error::invalid("C", "must be >= 0"));
    }
    let labels = d.class_labels()?;
    let u = d.n_unlabeled();
    let mut ens = BoostEnsemble::new(d)?;
    if u == 0 {
        return Ok(ens);
    }
    let x_all = d.all_x();
    let gamma = match cfg.gamma {
        Some(g) if g > 0.0 => g,
        Some(_) => return Err(Error::invalid("gamma", "must be > 0")),
        None => default_gamma(&x_all),
    };
    let s = rbf_gram(&x_all, gamma);
    let n_sel = (math::round(cfg.sample_fraction * u as f64) as usize).clamp(1, u);
    let mut h_u = alloc::vec![0.0; u];

    for _ in 0..cfg.rounds {
        let (p, q) = semiboost_pq(&s, labels, &h_u, cfg.c);
        let z: Vec<usize> = p.iter().zip(&q).map(|(a, b)| class_of(a - b)).collect();
        let conf: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).collect();

        let mut order: Vec<usize> = (0..u).collect();
        order.sort_by(|&a, &b| conf[b].total_cmp(&conf[a]).then(a.cmp(&b)));
        let picked = &order[..n_sel];
        let mean_conf = picked.iter().map(|&i| conf[i]).sum::<f64>() / n_sel as f64;

        let x_fit = d.x.vstack(&d.unlabeled_x.select_rows(picked))?;
        let mut y_fit = labels.to_vec();
        y_fit.extend(picked.iter().map(|&i| z[i]));
        let mut w_fit = alloc::vec![1.0; labels.len()];
        w_fit.extend(picked.iter().map(|&i| if mean_conf > 0.0 { conf[i] / mean_conf } else { 1.0 }));
        let model = base.fit(&x_fit, &y_fit, 2, Some(&w_fit))?;

        let h = model.predict(&d.unlabeled_x);
        let (mut agree, mut disagree) = (0.0, 0.0);
        for i in 0..u {
            if h[i] == z[i] {
                agree += conf[i];
            } else {
                disagree += conf[i];
            }
        }
        let alpha = if disagree > 0.0 {
            (0.25 * math::ln(agree / disagree)).min(ALPHA_CAP)
        } else if agree > 0.0 {
            ALPHA_CAP
        } else {
            0.0
        };
        if !(alpha > 0.0) {
            break;
        }
        for (hi, &c) in h_u.iter_mut().zip(&h) {
            *hi += alpha * sign_of(c);
        }
        ens.members.push((model, alpha));
    }
    Ok(ens)
}
