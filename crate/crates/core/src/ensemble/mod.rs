//! Boosting with unlabeled data: Assemble and SemiBoost. Both are binary;
//! class index 1 is the `+1` side.

mod assemble;
mod semiboost;

pub use assemble::{assemble_fit, AssembleConfig};
pub use semiboost::{semiboost_fit, semiboost_pq, SemiBoostConfig};

use alloc::vec::Vec;

use crate::base::{BaseClassifier, BaseLearnerSpec, KnnClassifier, KnnConfig};
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

/// Vote weights are capped here so a perfect learner keeps `H` finite.
pub const ALPHA_CAP: f64 = 10.0;

pub(crate) fn sign_of(c: usize) -> f64 {
    if c == 1 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn class_of(score: f64) -> usize {
    usize::from(score > 0.0)
}

pub(crate) fn check_binary(d: &TrainingSet, name: &str, base: &BaseLearnerSpec) -> Result<()> {
    if d.n_classes() != 2 {
        return Err(Error::Unsupported(alloc::format!("{name} is binary only")));
    }
    if !base.supports_weights() {
        return Err(Error::invalid(
            "base",
            alloc::format!("{} cannot fit sample weights", base.kind().name()),
        ));
    }
    Ok(())
}

/// Weighted vote `H(x) = Σ α_t h_t(x)` with `h_t ∈ {−1, +1}`. An empty
/// ensemble predicts with 1-NN on the labeled set.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostEnsemble {
    pub members: Vec<(BaseClassifier, f64)>,
    fallback: KnnClassifier,
    /// Sample weights after every round (Assemble only).
    pub weight_history: Vec<Vec<f64>>,
}

impl BoostEnsemble {
    pub(crate) fn new(d: &TrainingSet) -> Result<Self> {
        let cfg = KnnConfig {
            k: 1,
            ..KnnConfig::default()
        };
        Ok(Self {
            members: Vec::new(),
            fallback: KnnClassifier::fit(&d.x, d.class_labels()?, 2, cfg)?,
            weight_history: Vec::new(),
        })
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.1).collect()
    }

    pub fn score(&self, x: &Matrix) -> Vec<f64> {
        let mut h = alloc::vec![0.0; x.rows()];
        for (m, a) in &self.members {
            for (hi, c) in h.iter_mut().zip(m.predict(x)) {
                *hi += a * sign_of(c);
            }
        }
        h
    }

    /// `[σ(−2H), σ(2H)]`, or the 1-NN distribution when empty.
    pub fn predict_proba(&self, x: &Matrix) -> Matrix {
        if self.members.is_empty() {
            return self.fallback.predict_proba(x);
        }
        let h = self.score(x);
        let mut out = Matrix::zeros(x.rows(), 2);
        for (i, hi) in h.iter().enumerate() {
            let p = 1.0 / (1.0 + math::exp(-2.0 * hi));
            out[(i, 0)] = 1.0 - p;
            out[(i, 1)] = p;
        }
        out
    }

    /// `H > 0` is class 1; `H = 0` goes to class 0.
    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        if self.members.is_empty() {
            return self.fallback.predict(x);
        }
        self.score(x).into_iter().map(class_of).collect()
    }
}
