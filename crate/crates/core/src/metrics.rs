//! Evaluation metrics: 7 for classification (plus the confusion matrix),
//! 5 for regression and 4 for clustering.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::{Labels, Prediction, TaskKind};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Accuracy,
    PrecisionMacro,
    RecallMacro,
    F1Macro,
    F1Micro,
    LogLoss,
    /// Top-2 accuracy.
    TopKAccuracy,
    Mse,
    Rmse,
    Mae,
    R2,
    Mape,
    Ari,
    Nmi,
    Fmi,
    Purity,
}

/// Probabilities are clipped to `[LOG_LOSS_EPS, 1 − LOG_LOSS_EPS]`.
pub const LOG_LOSS_EPS: f64 = 1e-15;
pub const TOP_K: usize = 2;

impl Metric {
    pub const ALL: [Metric; 16] = [
        Metric::Accuracy,
        Metric::PrecisionMacro,
        Metric::RecallMacro,
        Metric::F1Macro,
        Metric::F1Micro,
        Metric::LogLoss,
        Metric::TopKAccuracy,
        Metric::Mse,
        Metric::Rmse,
        Metric::Mae,
        Metric::R2,
        Metric::Mape,
        Metric::Ari,
        Metric::Nmi,
        Metric::Fmi,
        Metric::Purity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::PrecisionMacro => "precision_macro",
            Metric::RecallMacro => "recall_macro",
            Metric::F1Macro => "f1_macro",
            Metric::F1Micro => "f1_micro",
            Metric::LogLoss => "log_loss",
            Metric::TopKAccuracy => "top_k_accuracy",
            Metric::Mse => "mse",
            Metric::Rmse => "rmse",
            Metric::Mae => "mae",
            Metric::R2 => "r2",
            Metric::Mape => "mape",
            Metric::Ari => "ari",
            Metric::Nmi => "nmi",
            Metric::Fmi => "fmi",
            Metric::Purity => "purity",
        }
    }

    pub fn parse(name: &str) -> Result<Metric> {
        Metric::ALL
            .iter()
            .copied()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::invalid("metric", alloc::format!("unknown metric `{name}`")))
    }

    pub fn task(self) -> TaskKind {
        match self {
            Metric::Accuracy
            | Metric::PrecisionMacro
            | Metric::RecallMacro
            | Metric::F1Macro
            | Metric::F1Micro
            | Metric::LogLoss
            | Metric::TopKAccuracy => TaskKind::Classification,
            Metric::Mse | Metric::Rmse | Metric::Mae | Metric::R2 | Metric::Mape => TaskKind::Regression,
            Metric::Ari | Metric::Nmi | Metric::Fmi | Metric::Purity => TaskKind::Clustering,
        }
    }

    pub fn needs_scores(self) -> bool {
        matches!(self, Metric::LogLoss | Metric::TopKAccuracy)
    }

    pub fn higher_is_better(self) -> bool {
        !matches!(
            self,
            Metric::LogLoss | Metric::Mse | Metric::Rmse | Metric::Mae | Metric::Mape
        )
    }

    /// Metrics computed by default for a task.
    pub fn defaults(task: TaskKind) -> Vec<Metric> {
        Metric::ALL
            .iter()
            .copied()
            .filter(|m| m.task() == task && !m.needs_scores())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub classes: Vec<i64>,
    /// `counts[t][p]`: rows are true classes, columns predictions.
    pub counts: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricReport {
    pub values: Vec<(Metric, f64)>,
    pub confusion: Option<ConfusionMatrix>,
    pub warnings: Vec<String>,
}

impl MetricReport {
    pub fn get(&self, m: Metric) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == m).map(|(_, v)| *v)
    }

    fn push(&mut self, m: Metric, v: f64) {
        self.values.push((m, v));
    }

    /// Keeps only `wanted`, in that order.
    pub fn retain(&mut self, wanted: &[Metric]) {
        self.values = wanted
            .iter()
            .filter_map(|&m| self.get(m).map(|v| (m, v)))
            .collect();
    }
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::dims("prediction count", a, b));
    }
    if a == 0 {
        return Err(Error::InvalidData("metrics need at least one sample".into()));
    }
    Ok(())
}

fn sorted_union(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut c: Vec<i64> = a.iter().chain(b).copied().collect();
    c.sort_unstable();
    c.dedup();
    c
}

fn index_of(classes: &[i64], c: i64) -> usize {
    classes.binary_search(&c).expect("class in union")
}

/// All classification metrics. `scores` pairs a probability matrix with the
/// class id of each column; log loss and top-2 accuracy need it.
pub fn classification_metrics(
    y_true: &[i64],
    y_pred: &[i64],
    scores: Option<(&Matrix, &[i64])>,
) -> Result<MetricReport> {
    same_len(y_true.len(), y_pred.len())?;
    let n = y_true.len();
    let classes = sorted_union(y_true, y_pred);
    let k = classes.len();
    let mut counts = alloc::vec![alloc::vec![0usize; k]; k];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        counts[index_of(&classes, t)][index_of(&classes, p)] += 1;
    }
    let mut rep = MetricReport::default();
    let correct: usize = (0..k).map(|c| counts[c][c]).sum();
    let accuracy = correct as f64 / n as f64;

    let (mut p_sum, mut r_sum, mut f_sum) = (0.0, 0.0, 0.0);
    for c in 0..k {
        let tp = counts[c][c] as f64;
        let actual: usize = counts[c].iter().sum();
        let predicted: usize = counts.iter().map(|r| r[c]).sum();
        if actual == 0 {
            rep.warnings.push(alloc::format!(
                "class {} never occurs in y_true; its precision and recall count as 0",
                classes[c]
            ));
        }
        let precision = if predicted > 0 { tp / predicted as f64 } else { 0.0 };
        let recall = if actual > 0 { tp / actual as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        p_sum += precision;
        r_sum += recall;
        f_sum += f1;
    }
    rep.push(Metric::Accuracy, accuracy);
    rep.push(Metric::PrecisionMacro, p_sum / k as f64);
    rep.push(Metric::RecallMacro, r_sum / k as f64);
    rep.push(Metric::F1Macro, f_sum / k as f64);
    // single-label: micro precision = micro recall = accuracy
    rep.push(Metric::F1Micro, accuracy);

    if let Some((s, score_classes)) = scores {
        if s.rows() != n || s.cols() != score_classes.len() {
            return Err(Error::dims("score matrix", n, s.rows()));
        }
        let mut ll = 0.0;
        let mut hits = 0usize;
        for (i, &t) in y_true.iter().enumerate() {
            let row = s.row(i);
            let col = score_classes.iter().position(|&c| c == t);
            let p = col.map_or(0.0, |j| row[j]);
            ll -= math::ln(p.clamp(LOG_LOSS_EPS, 1.0 - LOG_LOSS_EPS));
            if let Some(j) = col {
                let rank = row
                    .iter()
                    .enumerate()
                    .filter(|&(o, &v)| v > row[j] || (v == row[j] && o < j))
                    .count();
                if rank < TOP_K {
                    hits += 1;
                }
            }
        }
        rep.push(Metric::LogLoss, ll / n as f64);
        rep.push(Metric::TopKAccuracy, hits as f64 / n as f64);
    }
    rep.confusion = Some(ConfusionMatrix { classes, counts });
    Ok(rep)
}

pub fn regression_metrics(y_true: &[f64], y_pred: &[f64]) -> Result<MetricReport> {
    same_len(y_true.len(), y_pred.len())?;
    let n = y_true.len() as f64;
    let mut rep = MetricReport::default();
    let (mut se, mut ae) = (0.0, 0.0);
    for (t, p) in y_true.iter().zip(y_pred) {
        se += (t - p) * (t - p);
        ae += (t - p).abs();
    }
    let mse = se / n;
    rep.push(Metric::Mse, mse);
    rep.push(Metric::Rmse, math::sqrt(mse));
    rep.push(Metric::Mae, ae / n);
    if y_true.len() >= 2 {
        let mean = math::mean(y_true);
        let ss_tot: f64 = y_true.iter().map(|t| (t - mean) * (t - mean)).sum();
        let r2 = if ss_tot > 0.0 {
            1.0 - se / ss_tot
        } else {
            rep.warnings.push("r2 with constant y_true: reported as 1 if exact, else 0".into());
            if se == 0.0 {
                1.0
            } else {
                0.0
            }
        };
        rep.push(Metric::R2, r2);
    } else {
        rep.warnings.push("r2 needs at least two samples; skipped".into());
    }
    let (mut ape, mut used) = (0.0, 0usize);
    for (t, p) in y_true.iter().zip(y_pred) {
        if *t != 0.0 {
            ape += ((t - p) / t).abs();
            used += 1;
        }
    }
    if used < y_true.len() {
        rep.warnings.push(alloc::format!(
            "mape skipped {} zero targets",
            y_true.len() - used
        ));
    }
    if used > 0 {
        rep.push(Metric::Mape, ape / used as f64);
    }
    Ok(rep)
}

fn comb2(n: usize) -> f64 {
    let n = n as f64;
    n * (n - 1.0) / 2.0
}

pub fn clustering_metrics(labels_true: &[i64], labels_pred: &[i64]) -> Result<MetricReport> {
    same_len(labels_true.len(), labels_pred.len())?;
    let n = labels_true.len();
    let ct = sorted_union(labels_true, &[]);
    let cp = sorted_union(labels_pred, &[]);
    let mut table = alloc::vec![alloc::vec![0usize; cp.len()]; ct.len()];
    for (&t, &p) in labels_true.iter().zip(labels_pred) {
        table[index_of(&ct, t)][index_of(&cp, p)] += 1;
    }
    let a: Vec<usize> = table.iter().map(|r| r.iter().sum()).collect();
    let b: Vec<usize> = (0..cp.len()).map(|j| table.iter().map(|r| r[j]).sum()).collect();

    let index: f64 = table.iter().flatten().map(|&v| comb2(v)).sum();
    let sum_a: f64 = a.iter().map(|&v| comb2(v)).sum();
    let sum_b: f64 = b.iter().map(|&v| comb2(v)).sum();
    let total = comb2(n);
    let expected = if total > 0.0 { sum_a * sum_b / total } else { 0.0 };
    let max_index = 0.5 * (sum_a + sum_b);
    let ari = if max_index == expected {
        1.0
    } else {
        (index - expected) / (max_index - expected)
    };

    let nf = n as f64;
    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / nf;
                -p * math::ln(p)
            })
            .sum()
    };
    let (hu, hv) = (entropy(&a), entropy(&b));
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let v = nij as f64;
                mi += v / nf * math::ln(v * nf / (a[i] as f64 * b[j] as f64));
            }
        }
    }
    let nmi = if hu == 0.0 && hv == 0.0 {
        1.0
    } else {
        (mi / (0.5 * (hu + hv))).clamp(0.0, 1.0)
    };
    let fmi = if sum_a > 0.0 && sum_b > 0.0 {
        index / math::sqrt(sum_a * sum_b)
    } else {
        0.0
    };
    let purity = (0..cp.len())
        .map(|j| table.iter().map(|r| r[j]).max().unwrap_or(0))
        .sum::<usize>() as f64
        / nf;

    let mut rep = MetricReport::default();
    rep.push(Metric::Ari, ari);
    rep.push(Metric::Nmi, nmi);
    rep.push(Metric::Fmi, fmi);
    rep.push(Metric::Purity, purity);
    Ok(rep)
}

/// Class ids from labels; real labels must be integral.
pub fn class_ids(labels: &Labels) -> Result<Vec<i64>> {
    match labels {
        Labels::Class(v) => Ok(v.clone()),
        Labels::Real(v) => v
            .iter()
            .map(|&x| {
                if x.is_finite() && math::floor(x) == x {
                    Ok(x as i64)
                } else {
                    Err(Error::InvalidData("class labels must be integers".into()))
                }
            })
            .collect(),
    }
}

pub fn real_values(labels: &Labels) -> Vec<f64> {
    match labels {
        Labels::Real(v) => v.clone(),
        Labels::Class(v) => v.iter().map(|&c| c as f64).collect(),
    }
}

/// Computes `wanted` (all metrics of the task when empty) for a prediction.
pub fn evaluate(task: TaskKind, wanted: &[Metric], truth: &Labels, pred: &Prediction) -> Result<MetricReport> {
    for m in wanted {
        if m.task() != task {
            return Err(Error::invalid(
                "metrics",
                alloc::format!("{} does not apply to {} tasks", m.name(), task.as_str()),
            ));
        }
        if m.needs_scores() && pred.scores.is_none() {
            return Err(Error::invalid(
                "metrics",
                alloc::format!("{} needs class scores, which this algorithm does not produce", m.name()),
            ));
        }
    }
    let mut rep = match task {
        TaskKind::Classification => classification_metrics(
            &class_ids(truth)?,
            &class_ids(&pred.labels)?,
            pred.scores.as_ref().map(|s| (s, pred.classes.as_slice())),
        )?,
        TaskKind::Regression => regression_metrics(&real_values(truth), &real_values(&pred.labels))?,
        TaskKind::Clustering => clustering_metrics(&class_ids(truth)?, &class_ids(&pred.labels)?)?,
    };
    if !wanted.is_empty() {
        rep.retain(wanted);
    }
    Ok(rep)
}

/// A metric as a quantity to maximize: error metrics are negated.
pub fn search_score(m: Metric, truth: &Labels, pred: &Prediction) -> Result<f64> {
    let rep = evaluate(m.task(), &[m], truth, pred)?;
    let v = rep
        .get(m)
        .ok_or_else(|| Error::InvalidData(alloc::format!("{} is undefined on this fold", m.name())))?;
    Ok(if m.higher_is_better() { v } else { -v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_two_thirds() {
        let r = classification_metrics(&[1, 0, 1], &[1, 1, 1], None).unwrap();
        assert!((r.get(Metric::Accuracy).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.get(Metric::LogLoss), None);
    }

    #[test]
    fn binary_log_loss() {
        let s = Matrix::from_rows(&[[0.9, 0.1], [0.2, 0.8]]).unwrap();
        let r = classification_metrics(&[0, 1], &[0, 1], Some((&s, &[0, 1]))).unwrap();
        let expect = -(0.9f64.ln() + 0.8f64.ln()) / 2.0;
        assert!((r.get(Metric::LogLoss).unwrap() - expect).abs() < 1e-12);
        assert_eq!(r.get(Metric::TopKAccuracy), Some(1.0));
    }

    #[test]
    fn perfect_prediction() {
        let y = [3, 1, 2, 3];
        let r = classification_metrics(&y, &y, None).unwrap();
        for m in [Metric::Accuracy, Metric::F1Macro, Metric::F1Micro] {
            assert_eq!(r.get(m), Some(1.0));
        }
        let cm = r.confusion.unwrap();
        for (i, row) in cm.counts.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i != j {
                    assert_eq!(v, 0);
                }
            }
        }
    }

    #[test]
    fn regression_arithmetic() {
        let r = regression_metrics(&[1.0, 2.0], &[2.0, 2.0]).unwrap();
        assert_eq!(r.get(Metric::Mse), Some(0.5));
        assert_eq!(r.get(Metric::Mae), Some(0.5));
        let r = regression_metrics(&[1.0, 2.0, 6.0], &[3.0, 3.0, 3.0]).unwrap();
        assert_eq!(r.get(Metric::R2), Some(0.0));
    }

    #[test]
    fn single_cluster_ari_is_zero() {
        let r = clustering_metrics(&[0, 0, 1, 1], &[5, 5, 5, 5]).unwrap();
        assert_eq!(r.get(Metric::Ari), Some(0.0));
        assert_eq!(r.get(Metric::Purity), Some(0.5));
    }

    #[test]
    fn relabeled_partition_scores_one() {
        let r = clustering_metrics(&[0, 0, 1, 2, 2], &[7, 7, 3, 9, 9]).unwrap();
        for m in [Metric::Ari, Metric::Nmi, Metric::Fmi, Metric::Purity] {
            assert!((r.get(m).unwrap() - 1.0).abs() < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(Metric::parse(m.name()).unwrap(), m);
        }
        assert!(Metric::parse("roc_auc").is_err());
    }
}
