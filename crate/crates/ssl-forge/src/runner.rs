//! One experiment end to end: load, split, transform, fit, predict on the
//! held-out remainder, score.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use ssl_forge_core::data::{split_labeled_unlabeled, transform_fit_apply, TransformKind, TransformerState};
use ssl_forge_core::metrics::evaluate;
use ssl_forge_core::model_selection::{SearchPlan, SearchResult};
use ssl_forge_core::{
    pipeline_fit, Diagnostics, Labels, Matrix, ParamMap, PipelineSpec, Prediction, SslDataset, TaskKind,
};

use crate::config::{DatasetSource, ExperimentConfig};
use crate::error::{Error, Result};
use crate::synthetic::SyntheticKind;
use crate::table::load_csv;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentResult {
    /// The configuration as parsed, with defaults filled in.
    pub config: ExperimentConfig,
    /// The effective experiment seed.
    pub seed: u64,
    pub algorithm: String,
    pub task: TaskKind,
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    /// Held-out rows that were predicted and scored.
    pub n_evaluated: usize,
    pub metrics: BTreeMap<String, f64>,
    pub wall_time_s: f64,
    pub diagnostics: DiagnosticsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchDoc>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsDoc {
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub objective: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchDoc {
    pub metric: String,
    pub best_params: ParamMap,
    pub candidates: Vec<CandidateDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateDoc {
    pub params: ParamMap,
    /// Mean fold score, error metrics negated; null when a fold failed.
    pub mean: Option<f64>,
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Result document plus the held-out truth and predictions behind it.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub result: ExperimentResult,
    pub truth: Labels,
    pub prediction: Prediction,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Features, labels and extra unlabeled rows of the configured source.
pub fn load_source(src: &DatasetSource, seed: u64) -> Result<(Matrix, Labels, Matrix)> {
    match src {
        DatasetSource::Csv { path, label_column } => {
            let d = load_csv(path, label_column)?.dataset;
            Ok((d.x, d.y, d.unlabeled_x))
        }
        DatasetSource::Synthetic { kind, params, seed: s } => {
            let (x, y) = SyntheticKind::parse(kind)?.generate(params, s.unwrap_or(seed))?;
            let cols = x.cols();
            Ok((x, y, Matrix::zeros(0, cols)))
        }
    }
}

fn coerce(y: Labels, task: TaskKind) -> Result<Labels> {
    match (task, y) {
        (TaskKind::Regression, Labels::Class(v)) => Ok(Labels::Real(v.into_iter().map(|c| c as f64).collect())),
        (TaskKind::Classification | TaskKind::Clustering, Labels::Real(_)) => Err(Error::Data(format!(
            "{} needs class labels, but the labels are real-valued",
            task.as_str()
        ))),
        (_, y) => Ok(y),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    run_experiment_observed(cfg, seed, &mut |_| {})
}

/// Like [`run_experiment`], calling `observe` with every dataset handed to
/// a fit. Held-out rows appear in it only as unlabeled features.
pub fn run_experiment_observed(
    cfg: &ExperimentConfig,
    seed: u64,
    observe: &mut dyn FnMut(&SslDataset),
) -> Result<Outcome> {
    let start = Instant::now();
    let resolved = cfg.resolve()?;
    let task = resolved.task();
    let mut warnings = Vec::new();

    let (x, y, extra) = load_source(&cfg.dataset, seed)?;
    let y = coerce(y, task)?;
    let stratified = cfg.split.stratified && matches!(y, Labels::Class(_));
    if cfg.split.stratified && !stratified {
        warnings.push("stratified split ignored for real-valued labels".to_string());
    }
    let split = split_labeled_unlabeled(&x, &y, cfg.split.n_labeled, stratified, cfg.split.seed.unwrap_or(seed))?;
    let held_x = split.dataset.unlabeled_x.clone();
    let pool = if extra.rows() == 0 {
        held_x.clone()
    } else if held_x.rows() == 0 {
        extra
    } else {
        held_x.vstack(&extra)?
    };
    let fit_data = SslDataset::new(split.dataset.x.clone(), split.dataset.y.clone(), pool);
    observe(&fit_data);

    let (prediction, diag, search) = match &resolved.search {
        None => {
            let fitted = pipeline_fit(&resolved.pipeline, &fit_data, seed)?;
            warnings.extend(fitted.warnings());
            (fitted.predict(&held_x)?, fitted.model.diagnostics.clone(), None)
        }
        Some((candidates, sc)) => {
            let (states, data) = fit_transformers(&resolved.pipeline, &fit_data)?;
            for (name, s) in &states {
                warnings.extend(s.warnings().iter().map(|w| format!("{name}: {w}")));
            }
            let mut sc = sc.clone();
            sc.seed = seed;
            let plan = SearchPlan::new(resolved.pipeline.estimator().clone(), candidates.clone(), data, sc.clone())?;
            let res = crate::search::run_parallel(&plan)?;
            let held = apply_transformers(&states, &held_x)?;
            let pred = res.refit.predict(&held)?;
            warnings.extend(res.warnings.iter().cloned());
            (pred, res.refit.diagnostics.clone(), Some(search_doc(sc.metric.name(), &res)))
        }
    };
    warnings.extend(diag.warnings.iter().cloned());

    let truth = split.unlabeled_y.clone();
    let mut metrics = BTreeMap::new();
    if truth.is_empty() {
        warnings.push("no held-out rows: every row is labeled, nothing to score".to_string());
    } else {
        let report = evaluate(task, &resolved.metrics, &truth, &prediction)?;
        warnings.extend(report.warnings.iter().cloned());
        for (m, v) in &report.values {
            match finite(*v) {
                Some(v) => {
                    metrics.insert(m.name().to_string(), v);
                }
                None => warnings.push(format!("{} is not finite", m.name())),
            }
        }
    }

    let result = ExperimentResult {
        config: cfg.clone(),
        seed,
        algorithm: resolved.pipeline.estimator().name().to_string(),
        task,
        n_labeled: fit_data.n_labeled(),
        n_unlabeled: fit_data.n_unlabeled(),
        n_evaluated: truth.len(),
        metrics,
        wall_time_s: start.elapsed().as_secs_f64(),
        diagnostics: diagnostics_doc(&diag),
        search,
        warnings,
    };
    Ok(Outcome {
        result,
        truth,
        prediction,
    })
}

fn diagnostics_doc(d: &Diagnostics) -> DiagnosticsDoc {
    DiagnosticsDoc {
        iterations: d.iterations,
        converged: d.converged,
        objective: d.objective.and_then(finite),
    }
}

fn search_doc(metric: &str, res: &SearchResult) -> SearchDoc {
    SearchDoc {
        metric: metric.to_string(),
        best_params: res.best_params.clone(),
        candidates: res
            .candidates
            .iter()
            .map(|c| CandidateDoc {
                params: c.params.clone(),
                mean: finite(c.mean),
                std: finite(c.std),
                error: c.error.clone(),
            })
            .collect(),
    }
}

fn step_err(step: &str, e: ssl_forge_core::Error) -> Error {
    Error::Core(ssl_forge_core::Error::Step {
        step: step.to_string(),
        source: Box::new(e),
    })
}

/// Fits the pipeline's transformers on labeled and unlabeled rows together
/// and returns the transformed dataset.
fn fit_transformers(spec: &PipelineSpec, d: &SslDataset) -> Result<(Vec<(String, TransformerState)>, SslDataset)> {
    let l = d.x.rows();
    let mut all = if d.unlabeled_x.rows() == 0 {
        d.x.clone()
    } else {
        d.x.vstack(&d.unlabeled_x)?
    };
    let mut states = Vec::new();
    for step in spec.steps() {
        let kind = TransformKind::parse(&step.transformer).map_err(|e| step_err(&step.name, e))?;
        let (state, out) = transform_fit_apply(kind, &step.params, &all).map_err(|e| step_err(&step.name, e))?;
        all = out;
        states.push((step.name.clone(), state));
    }
    let x = all.select_rows(&(0..l).collect::<Vec<_>>());
    let u = all.select_rows(&(l..all.rows()).collect::<Vec<_>>());
    Ok((states, SslDataset::new(x, d.y.clone(), u)))
}

fn apply_transformers(states: &[(String, TransformerState)], x: &Matrix) -> Result<Matrix> {
    let mut cur = x.clone();
    for (name, s) in states {
        cur = s.apply(&cur).map_err(|e| step_err(name, e))?;
    }
    Ok(cur)
}
