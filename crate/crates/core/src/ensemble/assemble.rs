use alloc::vec::Vec;

use super::{check_binary, class_of, sign_of, BoostEnsemble, ALPHA_CAP};
use crate::base::BaseLearnerSpec;
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssembleConfig {
    pub rounds: usize,
    /// Share of the initial weight mass on labeled points.
    pub beta: f64,
}

impl Default for AssembleConfig {
    fn default() -> Self {
        Self {
            rounds: 30,
            beta: 0.9,
        }
    }
}

/// Adaptive boosting over labeled points and pseudo-labeled unlabeled
/// points. Pseudo-labels start from 1-NN and follow `sign(H)` afterwards.
/// Weights are `w_i ∝ c_i·exp(−y_i H(x_i))` with `c_i` the initial share
/// (`beta/l` labeled, `(1 − beta)/u` unlabeled).
pub fn assemble_fit(d: &TrainingSet, base: &BaseLearnerSpec, cfg: AssembleConfig) -> Result<BoostEnsemble> {
    check_binary(d, "assemble", base)?;
    if !(0.0..=1.0).contains(&cfg.beta) {
        return Err(Error::invalid("beta", "must lie in [0, 1]"));
    }
    let labels = d.class_labels()?;
    let l = d.n_labeled();
    let u = d.n_unlabeled();
    let mut ens = BoostEnsemble::new(d)?;
    let x_all = d.all_x();

    let mut y: Vec<usize> = labels.to_vec();
    y.extend(ens.predict(&d.unlabeled_x));
    let mut prior: Vec<f64> = (0..l + u)
        .map(|i| if i < l { cfg.beta / l as f64 } else { (1.0 - cfg.beta) / u as f64 })
        .collect();
    let total: f64 = prior.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("beta", "no weight left on any sample"));
    }
    for p in &mut prior {
        *p /= total;
    }
    let mut w = prior.clone();
    let mut h_all = alloc::vec![0.0; l + u];

    for _ in 0..cfg.rounds {
        let model = base.fit(&x_all, &y, 2, Some(&w))?;
        let pred = model.predict(&x_all);
        let eps: f64 = pred
            .iter()
            .zip(&y)
            .zip(&w)
            .filter(|((p, t), _)| p != t)
            .map(|(_, wi)| wi)
            .sum();
        if eps >= 0.5 {
            break;
        }
        let alpha = if eps <= 0.0 {
            ALPHA_CAP
        } else {
            (0.5 * math::ln((1.0 - eps) / eps)).min(ALPHA_CAP)
        };
        for (hi, &c) in h_all.iter_mut().zip(&pred) {
            *hi += alpha * sign_of(c);
        }
        ens.members.push((model, alpha));
        if eps <= 0.0 {
            break;
        }
        for i in l..l + u {
            y[i] = class_of(h_all[i]);
        }
        let mut s = 0.0;
        for i in 0..l + u {
            w[i] = prior[i] * math::exp(-sign_of(y[i]) * h_all[i]);
            s += w[i];
        }
        for wi in &mut w {
            *wi /= s;
        }
        ens.weight_history.push(w.clone());
    }
    Ok(ens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::DecisionStump;
    use crate::dataset::{validate, Labels, SslDataset, TaskKind};
    use crate::matrix::Matrix;
    use crate::params::ParamMap;
    use crate::rng::Rng;

    fn stump() -> BaseLearnerSpec {
        BaseLearnerSpec::parse("decision_stump", &ParamMap::new()).unwrap()
    }

    /// Textbook AdaBoost with multiplicative reweighting.
    fn adaboost_alphas(x: &Matrix, y: &[usize], rounds: usize) -> Vec<f64> {
        let n = y.len();
        let mut w = alloc::vec![1.0 / n as f64; n];
        let mut out = Vec::new();
        for _ in 0..rounds {
            let s = DecisionStump::fit(x, y, 2, Some(&w));
            let pred = s.predict(x);
            let eps: f64 = (0..n).filter(|&i| pred[i] != y[i]).map(|i| w[i]).sum();
            if eps >= 0.5 {
                break;
            }
            if eps <= 0.0 {
                out.push(10.0);
                break;
            }
            let a = (0.5 * ((1.0 - eps) / eps).ln()).min(10.0);
            out.push(a);
            for i in 0..n {
                let m = if pred[i] == y[i] { -a } else { a };
                w[i] *= m.exp();
            }
            let z: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= z);
        }
        out
    }

    #[test]
    fn reduces_to_adaboost() {
        for seed in 0..5 {
            let mut rng = Rng::new(seed);
            let x = Matrix::from_vec(50, 2, (0..100).map(|_| rng.normal()).collect()).unwrap();
            let y: Vec<usize> = x
                .row_iter()
                .map(|r| usize::from(r[0] * r[0] + r[1] > 0.3))
                .collect();
            let t = validate(
                &SslDataset::supervised(x.clone(), Labels::Class(y.iter().map(|&c| c as i64).collect())),
                TaskKind::Classification,
            )
            .unwrap();
            let cfg = AssembleConfig { rounds: 20, beta: 1.0 };
            let ens = assemble_fit(&t, &stump(), cfg).unwrap();
            let oracle = adaboost_alphas(&x, &y, 20);
            assert_eq!(ens.alphas().len(), oracle.len());
            for (a, b) in ens.alphas().iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn weights_stay_on_the_simplex() {
        let (x, y) = crate::data::gen_two_moons(80, 0.2, 2);
        let y = y.as_class().unwrap();
        let lab: Vec<usize> = (0..80).step_by(8).collect();
        let unl: Vec<usize> = (0..80).filter(|i| i % 8 != 0).collect();
        let t = validate(
            &SslDataset::new(
                x.select_rows(&lab),
                Labels::Class(lab.iter().map(|&i| y[i]).collect()),
                x.select_rows(&unl),
            ),
            TaskKind::Classification,
        )
        .unwrap();
        let ens = assemble_fit(&t, &stump(), AssembleConfig::default()).unwrap();
        assert!(!ens.members.is_empty());
        for w in &ens.weight_history {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn coin_flip_learner_leaves_the_fallback() {
        // XOR-like labels: every stump has weighted error 0.5
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let t = validate(
            &SslDataset::supervised(x.clone(), Labels::Class(alloc::vec![0, 0, 1, 1])),
            TaskKind::Classification,
        )
        .unwrap();
        let ens = assemble_fit(&t, &stump(), AssembleConfig::default()).unwrap();
        assert!(ens.members.is_empty());
        assert_eq!(ens.predict(&x), alloc::vec![0, 0, 1, 1]);
    }

    #[test]
    fn alpha_for_ten_percent_error() {
        assert!((0.5 * math::ln(0.9 / 0.1) - 1.0986122886681098).abs() < 1e-12);
    }

    #[test]
    fn multiclass_and_unweighted_bases_rejected() {
        let x = Matrix::column(&[0.0, 1.0, 2.0]);
        let t = validate(
            &SslDataset::supervised(x, Labels::Class(alloc::vec![0, 1, 2])),
            TaskKind::Classification,
        )
        .unwrap();
        assert!(assemble_fit(&t, &stump(), AssembleConfig::default()).is_err());
        let x = Matrix::column(&[0.0, 1.0]);
        let t = validate(
            &SslDataset::supervised(x, Labels::Class(alloc::vec![0, 1])),
            TaskKind::Classification,
        )
        .unwrap();
        let knn = BaseLearnerSpec::parse("knn", &ParamMap::new()).unwrap();
        assert!(assemble_fit(&t, &knn, AssembleConfig::default()).is_err());
    }
}
