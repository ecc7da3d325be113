//! Semi-supervised learning algorithms behind one `fit(X, y, unlabeled_X)` /
//! `predict(X)` contract.
//!
//! The crate is `no_std` with `alloc`. Everything here is pure computation;
//! file formats, configuration and the command-line harness live in the
//! `ssl-forge` companion crate.
//!
//! Algorithm families:
//!
//! - graph based: [`graph`] (label propagation, label spreading)
//! - generative: [`gmm`] (semi-supervised Gaussian mixture via EM)
//! - margin based: [`svm`] (linear SVM, TSVM, LapSVM)
//! - disagreement based: [`disagreement`] (co-training, tri-training)
//! - ensembles: [`ensemble`] (Assemble, SemiBoost)
//! - regression: [`coreg`]
//! - clustering: [`cluster`] (COP k-means, seeded k-means)
//! - neural: [`neural`] (pseudo-label, Π-model, mean teacher, Π-model regression)
//!
//! Every algorithm is reachable by name through [`estimator::fit`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod base;
pub mod cluster;
pub mod coreg;
pub mod data;
pub mod dataset;
pub mod disagreement;
pub mod ensemble;
pub mod error;
pub mod estimator;
pub mod gmm;
pub mod graph;
pub mod linalg;
pub mod math;
pub mod matrix;
pub mod metrics;
pub mod model_selection;
pub mod neural;
pub mod params;
pub mod pipeline;
pub mod rng;
pub mod svm;

pub use dataset::{validate, Labels, Prediction, SslDataset, TaskKind, Targets, TrainingSet};
pub use error::{Error, ErrorKind, Result};
pub use estimator::{fit, Algorithm, Diagnostics, EstimatorSpec, FittedModel};
pub use matrix::Matrix;
pub use params::{ParamMap, ParamValue};
pub use pipeline::{pipeline_fit, FittedPipeline, PipelineSpec, PipelineStep};
pub use rng::Rng;
