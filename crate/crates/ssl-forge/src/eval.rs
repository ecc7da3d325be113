//! Prediction files and scoring them.
//!
//! A prediction file has columns `y_true`, `y_pred` and, for classifiers
//! with scores, one `score_<class id>` column per class.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use ssl_forge_core::metrics::evaluate;
use ssl_forge_core::{ErrorKind, Labels, Matrix, Prediction, TaskKind};

use crate::config::parse_metrics;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub task: TaskKind,
    pub n: usize,
    pub metrics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

fn label_cell(y: &Labels, i: usize) -> String {
    match y {
        Labels::Class(v) => v[i].to_string(),
        Labels::Real(v) => v[i].to_string(),
    }
}

pub fn write_predictions<W: Write>(out: W, truth: &Labels, pred: &Prediction) -> Result<()> {
    let fail = |e: csv::Error| Error::Data(format!("csv write failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["y_true".to_string(), "y_pred".to_string()];
    if pred.scores.is_some() {
        header.extend(pred.classes.iter().map(|c| format!("score_{c}")));
    }
    w.write_record(&header).map_err(fail)?;
    for i in 0..truth.len() {
        let mut rec = vec![label_cell(truth, i), label_cell(&pred.labels, i)];
        if let Some(s) = &pred.scores {
            rec.extend(s.row(i).iter().map(|v| v.to_string()));
        }
        w.write_record(&rec).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Data(format!("csv write failed: {e}")))
}

pub fn save_predictions(path: &Path, truth: &Labels, pred: &Prediction) -> Result<()> {
    let mut buf = Vec::new();
    write_predictions(&mut buf, truth, pred)?;
    File::create(path)
        .and_then(|mut f| f.write_all(&buf))
        .map_err(|source| Error::Write {
            path: path.to_path_buf(),
            source,
        })
}

/// Parses a prediction file into truth and prediction.
pub fn read_predictions<R: Read>(input: R, task: TaskKind) -> Result<(Labels, Prediction)> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Data(format!("unreadable header: {e}")))?
        .clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("prediction file lacks a `{name}` column")))
    };
    let (t_idx, p_idx) = (col("y_true")?, col("y_pred")?);
    let mut score_cols = Vec::new();
    for (j, h) in header.iter().enumerate() {
        if let Some(id) = h.strip_prefix("score_") {
            let id: i64 = id
                .parse()
                .map_err(|_| Error::Data(format!("score column `{h}` does not name an integer class")))?;
            score_cols.push((j, id));
        }
    }
    let mut truth_raw = Vec::new();
    let mut pred_raw = Vec::new();
    let mut scores = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let row = r + 1;
        let rec = rec.map_err(|e| Error::Data(format!("row {row}: {e}")))?;
        let num = |j: usize| -> Result<f64> {
            let cell = rec.get(j).unwrap_or("");
            cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                Error::Data(format!("unparseable number `{cell}` at row {row}, column {}", j + 1))
            })
        };
        truth_raw.push(num(t_idx)?);
        pred_raw.push(num(p_idx)?);
        for &(j, _) in &score_cols {
            scores.push(num(j)?);
        }
    }
    let as_labels = |v: Vec<f64>| -> Result<Labels> {
        match task {
            TaskKind::Regression => Ok(Labels::Real(v)),
            _ => v
                .iter()
                .map(|&x| {
                    if x.fract() == 0.0 {
                        Ok(x as i64)
                    } else {
                        Err(Error::Data(format!("class label `{x}` is not an integer")))
                    }
                })
                .collect::<Result<Vec<_>>>()
                .map(Labels::Class),
        }
    };
    let n = truth_raw.len();
    let truth = as_labels(truth_raw)?;
    let labels = as_labels(pred_raw)?;
    let (scores, classes) = if score_cols.is_empty() || task != TaskKind::Classification {
        (None, Vec::new())
    } else {
        (
            Some(Matrix::from_vec(n, score_cols.len(), scores)?),
            score_cols.iter().map(|&(_, c)| c).collect(),
        )
    };
    Ok((truth, Prediction { labels, scores, classes }))
}

pub fn eval_file(path: &Path, task: TaskKind, metrics: &[String]) -> Result<EvalReport> {
    let f = File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
        kind: ErrorKind::Data,
    })?;
    let wanted = parse_metrics(metrics, task)?;
    let (truth, pred) = read_predictions(f, task)?;
    if truth.is_empty() {
        return Err(Error::Data("prediction file has no rows".into()));
    }
    let rep = evaluate(task, &wanted, &truth, &pred)?;
    Ok(EvalReport {
        task,
        n: truth.len(),
        metrics: rep
            .values
            .iter()
            .filter(|(_, v)| v.is_finite())
            .map(|(m, v)| (m.name().to_string(), *v))
            .collect(),
        warnings: rep.warnings.clone(),
    })
}
