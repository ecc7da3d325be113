//! Transformer chains in front of an estimator. Every transformer fits on
//! labeled and unlabeled rows together.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::data::{transform_fit_apply, TransformKind, TransformerState};
use crate::dataset::{Prediction, SslDataset};
use crate::error::{Error, Result};
use crate::estimator::{fit, EstimatorSpec, FittedModel};
use crate::matrix::Matrix;
use crate::params::ParamMap;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineStep {
    pub name: String,
    pub transformer: String,
    pub params: ParamMap,
}

impl PipelineStep {
    pub fn new(name: &str, transformer: &str, params: ParamMap) -> Self {
        Self {
            name: name.to_string(),
            transformer: transformer.to_string(),
            params,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSpec {
    steps: Vec<PipelineStep>,
    estimator: EstimatorSpec,
}

impl PipelineSpec {
    /// Step names must be unique.
    pub fn new(steps: Vec<PipelineStep>, estimator: EstimatorSpec) -> Result<Self> {
        for (i, s) in steps.iter().enumerate() {
            if steps[..i].iter().any(|p| p.name == s.name) {
                return Err(Error::invalid(
                    "pipeline",
                    alloc::format!("duplicate step name `{}`", s.name),
                ));
            }
        }
        Ok(Self { steps, estimator })
    }

    pub fn steps(&self) -> &[PipelineStep] {
        &self.steps
    }

    pub fn estimator(&self) -> &EstimatorSpec {
        &self.estimator
    }
}

fn in_step<T>(step: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Step {
        step: step.to_string(),
        source: Box::new(e),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedPipeline {
    steps: Vec<(String, TransformerState)>,
    pub model: FittedModel,
}

impl FittedPipeline {
    pub fn steps(&self) -> &[(String, TransformerState)] {
        &self.steps
    }

    /// Runs `x` through every fitted transformer.
    pub fn transform(&self, x: &Matrix) -> Result<Matrix> {
        let mut cur = x.clone();
        for (name, state) in &self.steps {
            cur = in_step(name, state.apply(&cur))?;
        }
        Ok(cur)
    }

    pub fn predict(&self, x: &Matrix) -> Result<Prediction> {
        self.model.predict(&self.transform(x)?)
    }

    /// Warnings from every transformer, prefixed by step name.
    pub fn warnings(&self) -> Vec<String> {
        self.steps
            .iter()
            .flat_map(|(name, s)| s.warnings().iter().map(move |w| alloc::format!("{name}: {w}")))
            .collect()
    }
}

/// Fits the transformers in order on `X ∪ unlabeled_X`, then the estimator
/// on the transformed data.
pub fn pipeline_fit(spec: &PipelineSpec, d: &SslDataset, seed: u64) -> Result<FittedPipeline> {
    let l = d.x.rows();
    let mut x = d.x.clone();
    let mut u = d.unlabeled_x.clone();
    let mut fitted = Vec::with_capacity(spec.steps.len());
    for step in &spec.steps {
        let kind = in_step(&step.name, TransformKind::parse(&step.transformer))?;
        let all = if u.rows() == 0 {
            x.clone()
        } else {
            in_step(&step.name, x.vstack(&u))?
        };
        let (state, out) = in_step(&step.name, transform_fit_apply(kind, &step.params, &all))?;
        let labeled: Vec<usize> = (0..l).collect();
        let unlabeled: Vec<usize> = (l..out.rows()).collect();
        x = out.select_rows(&labeled);
        u = out.select_rows(&unlabeled);
        fitted.push((step.name.clone(), state));
    }
    let data = SslDataset::new(x, d.y.clone(), u);
    let model = fit(&spec.estimator, &data, seed)?;
    Ok(FittedPipeline { steps: fitted, model })
}
