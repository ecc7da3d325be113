//! Rendering of result documents as JSON, CSV or aligned text.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bench::BenchReport;
use crate::config::Format;
use crate::runner::ExperimentResult;

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents are always serializable");
    s.push('\n');
    s
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| rows.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(j, c)| format!("{c:<w$}", w = widths[j]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// A flat list of metric values as a two-column document.
pub fn render_metrics(metrics: &BTreeMap<String, f64>, format: Format) -> String {
    let mut rows = vec![vec!["metric".to_string(), "value".to_string()]];
    rows.extend(metrics.iter().map(|(k, v)| vec![k.clone(), v.to_string()]));
    match format {
        Format::Json => json(metrics),
        Format::Csv => rows.iter().map(|r| csv_line(r)).collect(),
        Format::Table => aligned(&rows),
    }
}

pub fn render_result(r: &ExperimentResult, format: Format) -> String {
    match format {
        Format::Json => json(r),
        _ => render_metrics(&r.metrics, format),
    }
}

pub fn render_bench(b: &BenchReport, format: Format) -> String {
    if format == Format::Json {
        return json(b);
    }
    let mut names: Vec<&String> = Vec::new();
    for row in &b.rows {
        for k in row.metrics.keys() {
            if !names.contains(&k) {
                names.push(k);
            }
        }
    }
    let mut header = vec!["algorithm".to_string(), "dataset".to_string(), "status".to_string(), "runs".to_string()];
    let mut rows = Vec::new();
    match format {
        Format::Csv => {
            for n in &names {
                header.push(format!("{n}_mean"));
                header.push(format!("{n}_std"));
            }
            header.push("error".to_string());
        }
        _ => {
            header.extend(names.iter().map(|n| n.to_string()));
            header.push("error".to_string());
        }
    }
    rows.push(header);
    for row in &b.rows {
        let status = match row.status {
            crate::bench::RowStatus::Ok => "ok",
            crate::bench::RowStatus::Failed => "FAILED",
        };
        let mut cells = vec![
            row.algorithm.clone(),
            row.dataset.clone(),
            status.to_string(),
            row.seeds.len().to_string(),
        ];
        for n in &names {
            match (format, row.metrics.get(*n)) {
                (Format::Csv, Some(s)) => {
                    cells.push(s.mean.to_string());
                    cells.push(s.std.to_string());
                }
                (Format::Csv, None) => cells.extend([String::new(), String::new()]),
                (_, Some(s)) => cells.push(format!("{:.4} ± {:.4}", s.mean, s.std)),
                (_, None) => cells.push("-".to_string()),
            }
        }
        cells.push(row.error.clone().unwrap_or_default());
        rows.push(cells);
    }
    match format {
        Format::Csv => rows.iter().map(|r| csv_line(r)).collect(),
        _ => aligned(&rows),
    }
}
