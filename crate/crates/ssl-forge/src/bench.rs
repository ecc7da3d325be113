//! Benchmark suites: every (dataset, algorithm) row over several seeds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SuiteConfig;
use crate::error::Result;
use crate::runner::{run_experiment, ExperimentResult};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Stat { mean, std }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRow {
    pub algorithm: String,
    pub dataset: String,
    pub seeds: Vec<u64>,
    pub status: RowStatus,
    /// First failure, prefixed with its seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Empty when the row failed.
    pub metrics: BTreeMap<String, Stat>,
    pub wall_time_s: Option<Stat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.status == RowStatus::Failed).count()
    }
}

/// Runs the suite on the current rayon pool. Rows follow suite order
/// whatever the thread count; a failing run marks its row and nothing else.
pub fn run_suite(suite: &SuiteConfig) -> Result<BenchReport> {
    let experiments = suite.experiments()?;
    let jobs: Vec<(usize, u64)> = (0..experiments.len())
        .flat_map(|r| suite.seeds.iter().map(move |&s| (r, s)))
        .collect();
    let outcomes: Vec<Result<ExperimentResult>> = jobs
        .par_iter()
        .map(|&(r, s)| run_experiment(&experiments[r].2, s).map(|o| o.result))
        .collect();

    let mut outcomes = outcomes.into_iter();
    let mut rows = Vec::with_capacity(experiments.len());
    for (algorithm, dataset, _) in experiments {
        let runs: Vec<_> = outcomes.by_ref().take(suite.seeds.len()).collect();
        let failure = runs
            .iter()
            .zip(&suite.seeds)
            .find_map(|(r, s)| r.as_ref().err().map(|e| format!("seed {s}: {e}")));
        let mut row = BenchRow {
            algorithm,
            dataset,
            seeds: suite.seeds.clone(),
            status: RowStatus::Failed,
            error: failure,
            metrics: BTreeMap::new(),
            wall_time_s: None,
        };
        if row.error.is_none() {
            let results: Vec<ExperimentResult> = runs.into_iter().map(|r| r.expect("checked above")).collect();
            row.status = RowStatus::Ok;
            let names: Vec<String> = results[0].metrics.keys().cloned().collect();
            for name in names {
                let values: Vec<f64> = results.iter().filter_map(|r| r.metrics.get(&name).copied()).collect();
                if values.len() == results.len() {
                    row.metrics.insert(name, Stat::of(&values));
                }
            }
            let times: Vec<f64> = results.iter().map(|r| r.wall_time_s).collect();
            row.wall_time_s = Some(Stat::of(&times));
        }
        rows.push(row);
    }
    Ok(BenchReport { rows })
}
