//! JSON experiment and suite configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use ssl_forge_core::metrics::Metric;
use ssl_forge_core::model_selection::{grid_candidates, SearchConfig};
use ssl_forge_core::{EstimatorSpec, ErrorKind, ParamMap, ParamValue, PipelineSpec, PipelineStep, TaskKind};

use crate::error::{Error, Result};
use crate::synthetic::SyntheticKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub split: SplitConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pipeline: Vec<StepConfig>,
    pub algorithm: AlgorithmConfig,
    /// Empty means every metric of the algorithm's task.
    #[serde(default)]
    pub metrics: Vec<String>,
    /// Experiment seed: drives the fit, and the split and generator when
    /// they carry no seed of their own.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        label_column: String,
    },
    Synthetic {
        kind: String,
        #[serde(default)]
        params: ParamMap,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub n_labeled: usize,
    #[serde(default = "yes")]
    pub stratified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub name: String,
    pub transformer: String,
    #[serde(default)]
    pub params: ParamMap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: String,
    #[serde(default)]
    pub params: ParamMap,
    /// Grid search over parameters, run on the labeled part of the split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    /// Parameter name to list of values. Keys vary in sorted order, the
    /// first key slowest.
    pub grid: ParamMap,
    pub metric: String,
    #[serde(default = "five")]
    pub folds: usize,
    #[serde(default = "yes")]
    pub stratified: bool,
}

fn five() -> usize {
    5
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// A benchmark suite: every algorithm runs on every dataset for every seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub datasets: Vec<SuiteDataset>,
    pub algorithms: Vec<SuiteAlgorithm>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub metrics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteDataset {
    pub name: String,
    pub dataset: DatasetSource,
    pub split: SplitConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pipeline: Vec<StepConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteAlgorithm {
    /// Row label; defaults to the algorithm name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub name: String,
    #[serde(default)]
    pub params: ParamMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSection>,
}

impl SuiteAlgorithm {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }

    pub fn algorithm(&self) -> AlgorithmConfig {
        AlgorithmConfig {
            name: self.name.clone(),
            params: self.params.clone(),
            search: self.search.clone(),
        }
    }
}

impl SuiteConfig {
    /// The experiments of the suite in row order: datasets outer, algorithms inner.
    pub fn experiments(&self) -> Result<Vec<(String, String, ExperimentConfig)>> {
        if self.datasets.is_empty() || self.algorithms.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("empty suite: need at least one dataset, algorithm and seed".into()));
        }
        let mut out = Vec::new();
        for d in &self.datasets {
            for a in &self.algorithms {
                let cfg = ExperimentConfig {
                    dataset: d.dataset.clone(),
                    split: d.split.clone(),
                    pipeline: d.pipeline.clone(),
                    algorithm: a.algorithm(),
                    metrics: self.metrics.clone(),
                    seed: 0,
                    output: None,
                };
                cfg.resolve()?;
                out.push((a.label().to_string(), d.name.clone(), cfg));
            }
        }
        Ok(out)
    }
}

/// The validated, typed form of an experiment's algorithm section.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub pipeline: PipelineSpec,
    pub metrics: Vec<Metric>,
    pub search: Option<(Vec<ParamMap>, SearchConfig)>,
}

impl Resolved {
    pub fn task(&self) -> TaskKind {
        self.pipeline.estimator().task()
    }
}

fn config_err(e: ssl_forge_core::Error) -> Error {
    if e.kind() == ErrorKind::Config {
        Error::Core(e)
    } else {
        Error::Config(e.to_string())
    }
}

impl ExperimentConfig {
    /// Checks names and parameters without touching any data.
    pub fn resolve(&self) -> Result<Resolved> {
        if let DatasetSource::Synthetic { kind, params, .. } = &self.dataset {
            SyntheticKind::parse(kind)?.check(params)?;
        }
        let spec = EstimatorSpec::new(&self.algorithm.name, self.algorithm.params.clone()).map_err(config_err)?;
        let task = spec.task();
        let metrics = parse_metrics(&self.metrics, task)?;
        let steps = self
            .pipeline
            .iter()
            .map(|s| {
                ssl_forge_core::data::TransformKind::parse(&s.transformer).map_err(config_err)?;
                Ok(PipelineStep::new(&s.name, &s.transformer, s.params.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let search = match &self.algorithm.search {
            None => None,
            Some(s) => {
                let metric = Metric::parse(&s.metric).map_err(config_err)?;
                if metric.task() != task {
                    return Err(Error::Config(format!(
                        "search metric `{}` does not apply to {} tasks",
                        s.metric,
                        task.as_str()
                    )));
                }
                let mut grid = Vec::new();
                for (k, v) in s.grid.iter() {
                    match v {
                        ParamValue::List(values) if !values.is_empty() => grid.push((k.clone(), values.clone())),
                        _ => return Err(Error::Config(format!("search grid entry `{k}` must be a nonempty list"))),
                    }
                }
                let candidates = grid_candidates(&grid).map_err(config_err)?;
                for c in &candidates {
                    spec.with_params(c).map_err(config_err)?;
                }
                let mut sc = SearchConfig::new(metric);
                sc.folds = s.folds;
                sc.stratified = s.stratified;
                sc.seed = self.seed;
                Some((candidates, sc))
            }
        };
        let pipeline = PipelineSpec::new(steps, spec).map_err(config_err)?;
        Ok(Resolved {
            pipeline,
            metrics,
            search,
        })
    }
}

pub fn parse_metrics(names: &[String], task: TaskKind) -> Result<Vec<Metric>> {
    names
        .iter()
        .map(|n| {
            let m = Metric::parse(n).map_err(config_err)?;
            if m.task() != task {
                return Err(Error::Config(format!(
                    "metric `{n}` does not apply to {} tasks",
                    task.as_str()
                )));
            }
            Ok(m)
        })
        .collect()
}

/// Reads and parses a JSON config. Unreadable files and schema violations
/// are configuration errors.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
        kind: ErrorKind::Config,
    })?;
    parse_json(&text)
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
}
