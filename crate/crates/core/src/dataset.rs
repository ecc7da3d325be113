//! The universal fit input and prediction output.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskKind {
    Classification,
    Regression,
    Clustering,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Classification => "classification",
            TaskKind::Regression => "regression",
            TaskKind::Clustering => "clustering",
        }
    }
}

/// Per-sample targets as supplied by the caller. Class ids may be arbitrary
/// integers; they are re-indexed densely by [`validate`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Labels {
    Class(Vec<i64>),
    Real(Vec<f64>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Class(v) => v.len(),
            Labels::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn select(&self, idx: &[usize]) -> Labels {
        match self {
            Labels::Class(v) => Labels::Class(idx.iter().map(|&i| v[i]).collect()),
            Labels::Real(v) => Labels::Real(idx.iter().map(|&i| v[i]).collect()),
        }
    }

    pub fn as_class(&self) -> Option<&[i64]> {
        match self {
            Labels::Class(v) => Some(v),
            Labels::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Labels::Real(v) => Some(v),
            Labels::Class(_) => None,
        }
    }
}

/// Labeled samples, their labels, and unlabeled samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SslDataset {
    pub x: Matrix,
    pub y: Labels,
    pub unlabeled_x: Matrix,
}

impl SslDataset {
    pub fn new(x: Matrix, y: Labels, unlabeled_x: Matrix) -> Self {
        Self { x, y, unlabeled_x }
    }

    /// A dataset with no unlabeled samples.
    pub fn supervised(x: Matrix, y: Labels) -> Self {
        let cols = x.cols();
        Self {
            x,
            y,
            unlabeled_x: Matrix::zeros(0, cols),
        }
    }

    pub fn n_labeled(&self) -> usize {
        self.x.rows()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled_x.rows()
    }
}

/// Validated targets: dense class indices or real values.
#[derive(Clone, Debug, PartialEq)]
pub enum Targets {
    Class { labels: Vec<usize>, n_classes: usize },
    Real(Vec<f64>),
}

/// A dataset that passed [`validate`]: shapes agree, values are finite, and
/// class labels are dense `0..n_classes`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub x: Matrix,
    pub targets: Targets,
    pub unlabeled_x: Matrix,
    /// Original id of each dense class index. Empty for regression.
    pub classes: Vec<i64>,
    pub kind: TaskKind,
}

impl TrainingSet {
    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn n_labeled(&self) -> usize {
        self.x.rows()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled_x.rows()
    }

    pub fn class_labels(&self) -> Result<&[usize]> {
        match &self.targets {
            Targets::Class { labels, .. } => Ok(labels),
            Targets::Real(_) => Err(Error::Unsupported("class labels required".into())),
        }
    }

    pub fn n_classes(&self) -> usize {
        match &self.targets {
            Targets::Class { n_classes, .. } => *n_classes,
            Targets::Real(_) => 0,
        }
    }

    pub fn real_targets(&self) -> Result<&[f64]> {
        match &self.targets {
            Targets::Real(v) => Ok(v),
            Targets::Class { .. } => Err(Error::Unsupported("real-valued targets required".into())),
        }
    }

    /// Labeled rows followed by unlabeled rows.
    pub fn all_x(&self) -> Matrix {
        self.x
            .vstack(&self.unlabeled_x)
            .expect("validated widths agree")
    }

    /// Same data with different labeled targets, used by meta-algorithms to
    /// refit base learners on augmented sets.
    pub fn with_labeled(&self, x: Matrix, labels: Vec<usize>) -> TrainingSet {
        TrainingSet {
            x,
            targets: Targets::Class {
                labels,
                n_classes: self.n_classes(),
            },
            unlabeled_x: Matrix::zeros(0, self.n_features()),
            classes: self.classes.clone(),
            kind: self.kind,
        }
    }
}

/// Checks every dataset invariant and re-indexes class labels densely.
pub fn validate(d: &SslDataset, kind: TaskKind) -> Result<TrainingSet> {
    let cols = d.x.cols();
    if d.x.rows() == 0 {
        return Err(Error::EmptyLabeledSet);
    }
    if cols == 0 {
        return Err(Error::InvalidData("feature matrix has no columns".into()));
    }
    if d.y.len() != d.x.rows() {
        return Err(Error::dims("label count", d.x.rows(), d.y.len()));
    }
    let unlabeled_x = if d.unlabeled_x.rows() == 0 {
        Matrix::zeros(0, cols)
    } else if d.unlabeled_x.cols() != cols {
        return Err(Error::dims("feature-dimension", cols, d.unlabeled_x.cols()));
    } else {
        d.unlabeled_x.clone()
    };
    if let Some((row, col)) = d.x.first_non_finite() {
        return Err(Error::NonFinite {
            what: "X".to_string(),
            row,
            col,
        });
    }
    if let Some((row, col)) = unlabeled_x.first_non_finite() {
        return Err(Error::NonFinite {
            what: "unlabeled_X".to_string(),
            row,
            col,
        });
    }

    let (targets, classes) = match kind {
        TaskKind::Regression => {
            let values: Vec<f64> = match &d.y {
                Labels::Real(v) => v.clone(),
                Labels::Class(v) => v.iter().map(|&c| c as f64).collect(),
            };
            if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: "y".to_string(),
                    row,
                    col: 0,
                });
            }
            (Targets::Real(values), Vec::new())
        }
        TaskKind::Classification | TaskKind::Clustering => {
            let raw: Vec<i64> = match &d.y {
                Labels::Class(v) => v.clone(),
                Labels::Real(v) => {
                    let mut out = Vec::with_capacity(v.len());
                    for &x in v {
                        if !x.is_finite() || math::floor(x) != x {
                            return Err(Error::InvalidData(
                                "class labels must be integers".into(),
                            ));
                        }
                        out.push(x as i64);
                    }
                    out
                }
            };
            let mut classes = raw.clone();
            classes.sort_unstable();
            classes.dedup();
            if kind == TaskKind::Classification && classes.len() < 2 {
                return Err(Error::DegenerateLabels(
                    "classifiers need at least two labeled classes".into(),
                ));
            }
            let labels = raw
                .iter()
                .map(|c| classes.binary_search(c).expect("class present"))
                .collect();
            (
                Targets::Class {
                    labels,
                    n_classes: classes.len(),
                },
                classes,
            )
        }
    };

    Ok(TrainingSet {
        x: d.x.clone(),
        targets,
        unlabeled_x,
        classes,
        kind,
    })
}

/// Labels for every predicted row, plus per-class scores when the algorithm
/// defines them.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub labels: Labels,
    pub scores: Option<Matrix>,
    /// Class id of each score column.
    pub classes: Vec<i64>,
}

impl Prediction {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Raw output of a fitted algorithm, before class ids are mapped back.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Classes {
        labels: Vec<usize>,
        scores: Option<Matrix>,
    },
    Values(Vec<f64>),
}

impl Output {
    /// Hard labels from a score matrix by argmax, lowest index on ties.
    pub fn from_scores(scores: Matrix) -> Output {
        let labels = scores.row_iter().map(math::argmax).collect();
        Output::Classes {
            labels,
            scores: Some(scores),
        }
    }

    pub fn hard(labels: Vec<usize>) -> Output {
        Output::Classes {
            labels,
            scores: None,
        }
    }
}
