//! Minimal supervised learners, usable on their own and as base learners
//! inside the disagreement and ensemble meta-algorithms.

pub mod knn;
pub mod logistic;
pub mod naive_bayes;
pub mod stump;

use alloc::string::ToString;
use alloc::vec::Vec;

pub use knn::{KnnClassifier, KnnConfig, KnnRegressor};
pub use logistic::{LogisticConfig, LogisticRegression};
pub use naive_bayes::GaussianNb;
pub use stump::DecisionStump;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::params::{ParamMap, ParamReader};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseKind {
    KnnClassifier,
    KnnRegressor,
    GaussianNb,
    LogisticRegression,
    DecisionStump,
}

impl BaseKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "knn_classifier" | "knn" => BaseKind::KnnClassifier,
            "knn_regressor" => BaseKind::KnnRegressor,
            "gaussian_nb" => BaseKind::GaussianNb,
            "logistic_regression" => BaseKind::LogisticRegression,
            "decision_stump" => BaseKind::DecisionStump,
            other => return Err(Error::invalid("base", alloc::format!("unknown base learner `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseKind::KnnClassifier => "knn_classifier",
            BaseKind::KnnRegressor => "knn_regressor",
            BaseKind::GaussianNb => "gaussian_nb",
            BaseKind::LogisticRegression => "logistic_regression",
            BaseKind::DecisionStump => "decision_stump",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum BaseConfig {
    Knn(KnnConfig),
    Nb,
    Logistic(LogisticConfig),
    Stump,
}

/// A base learner kind with its validated parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseLearnerSpec {
    kind: BaseKind,
    config: BaseConfig,
}

impl BaseLearnerSpec {
    pub fn new(kind: BaseKind, params: &ParamMap) -> Result<Self> {
        let mut r = ParamReader::new(kind.name(), params);
        let config = match kind {
            BaseKind::KnnClassifier | BaseKind::KnnRegressor => {
                BaseConfig::Knn(KnnConfig::from_params(&mut r, 3)?)
            }
            BaseKind::GaussianNb => BaseConfig::Nb,
            BaseKind::LogisticRegression => BaseConfig::Logistic(LogisticConfig::from_params(&mut r)?),
            BaseKind::DecisionStump => BaseConfig::Stump,
        };
        r.finish()?;
        Ok(Self { kind, config })
    }

    pub fn parse(name: &str, params: &ParamMap) -> Result<Self> {
        Self::new(BaseKind::parse(name)?, params)
    }

    /// Reads `base` (name) and `base.*` (its parameters) from `r`.
    pub fn from_reader(r: &mut ParamReader<'_>, default: BaseKind) -> Result<Self> {
        let kind = match r.string_opt("base")? {
            Some(name) => BaseKind::parse(&name)?,
            None => default,
        };
        let sub = r.sub("base");
        Self::new(kind, &sub)
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn supports_proba(&self) -> bool {
        self.kind != BaseKind::KnnRegressor
    }

    pub fn supports_weights(&self) -> bool {
        matches!(
            self.kind,
            BaseKind::GaussianNb | BaseKind::LogisticRegression | BaseKind::DecisionStump
        )
    }

    /// Fits a classifier. kNN ignores `weights`; callers that need weights
    /// check [`supports_weights`](Self::supports_weights) first.
    pub fn fit(
        &self,
        x: &Matrix,
        y: &[usize],
        n_classes: usize,
        weights: Option<&[f64]>,
    ) -> Result<BaseClassifier> {
        Ok(match &self.config {
            BaseConfig::Knn(cfg) => {
                if self.kind == BaseKind::KnnRegressor {
                    return Err(Error::Unsupported(
                        "knn_regressor cannot serve as a classifier".to_string(),
                    ));
                }
                let cfg = KnnConfig {
                    k: cfg.k.min(x.rows()),
                    ..*cfg
                };
                BaseClassifier::Knn(KnnClassifier::fit(x, y, n_classes, cfg)?)
            }
            BaseConfig::Nb => BaseClassifier::Nb(GaussianNb::fit(x, y, n_classes, weights)),
            BaseConfig::Logistic(cfg) => {
                BaseClassifier::Logistic(LogisticRegression::fit(x, y, n_classes, weights, *cfg))
            }
            BaseConfig::Stump => BaseClassifier::Stump(DecisionStump::fit(x, y, n_classes, weights)),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BaseClassifier {
    Knn(KnnClassifier),
    Nb(GaussianNb),
    Logistic(LogisticRegression),
    Stump(DecisionStump),
}

impl BaseClassifier {
    pub fn predict_proba(&self, x: &Matrix) -> Matrix {
        match self {
            BaseClassifier::Knn(m) => m.predict_proba(x),
            BaseClassifier::Nb(m) => m.predict_proba(x),
            BaseClassifier::Logistic(m) => m.predict_proba(x),
            BaseClassifier::Stump(m) => m.predict_proba(x),
        }
    }

    pub fn predict(&self, x: &Matrix) -> Vec<usize> {
        match self {
            BaseClassifier::Stump(m) => m.predict(x),
            other => other
                .predict_proba(x)
                .row_iter()
                .map(crate::math::argmax)
                .collect(),
        }
    }
}
