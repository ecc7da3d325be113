//! The CSV dataset format: comma separated, mandatory header, one label
//! column. An empty label cell marks an unlabeled row.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ssl_forge_core::{Labels, Matrix, SslDataset};

use crate::error::{Error, Result};

/// A loaded CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvData {
    pub feature_names: Vec<String>,
    pub dataset: SslDataset,
    /// Original label strings when the labels were not numeric; class `i`
    /// stands for `class_names[i]`.
    pub class_names: Option<Vec<String>>,
}

pub fn load_csv(path: &Path, label_column: &str) -> Result<CsvData> {
    let file = File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
        kind: ssl_forge_core::ErrorKind::Data,
    })?;
    read_csv(file, label_column)
}

/// Label cells that all parse as integers become class ids; cells that all
/// parse as reals become regression targets; anything else is treated as
/// category names, numbered in sorted order.
pub fn read_csv<R: Read>(input: R, label_column: &str) -> Result<CsvData> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr
        .headers()
        .map_err(|e| Error::Data(format!("unreadable header: {e}")))?
        .clone();
    if header.is_empty() {
        return Err(Error::Data("missing header row".into()));
    }
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Data(format!("label column `{label_column}` not found in header")))?;
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    let d = feature_names.len();
    if d == 0 {
        return Err(Error::Data("no feature columns".into()));
    }

    let mut labeled = Vec::new();
    let mut unlabeled = Vec::new();
    let mut raw_labels = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let row = r + 1;
        let rec = rec.map_err(|e| Error::Data(format!("row {row}: {e}")))?;
        if rec.len() != header.len() {
            return Err(Error::Data(format!(
                "row {row}: expected {} fields, found {}",
                header.len(),
                rec.len()
            )));
        }
        let mut values = Vec::with_capacity(d);
        for (j, cell) in rec.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                Error::Data(format!(
                    "unparseable number `{cell}` at row {row}, column {} (`{}`)",
                    j + 1,
                    &header[j]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "non-finite value `{cell}` at row {row}, column {} (`{}`)",
                    j + 1,
                    &header[j]
                )));
            }
            values.push(v);
        }
        let label = &rec[label_idx];
        if label.is_empty() {
            unlabeled.extend(values);
        } else {
            labeled.extend(values);
            raw_labels.push(label.to_string());
        }
    }
    if raw_labels.is_empty() {
        return Err(Error::Data("zero labeled rows".into()));
    }
    let (y, class_names) = parse_labels(&raw_labels);
    let x = Matrix::from_vec(raw_labels.len(), d, labeled)?;
    let unlabeled_x = Matrix::from_vec(unlabeled.len() / d, d, unlabeled)?;
    Ok(CsvData {
        feature_names,
        dataset: SslDataset::new(x, y, unlabeled_x),
        class_names,
    })
}

fn parse_labels(raw: &[String]) -> (Labels, Option<Vec<String>>) {
    if let Ok(ids) = raw.iter().map(|s| s.parse::<i64>()).collect::<std::result::Result<Vec<_>, _>>() {
        return (Labels::Class(ids), None);
    }
    if let Ok(vals) = raw.iter().map(|s| s.parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>() {
        if vals.iter().all(|v| v.is_finite()) {
            return (Labels::Real(vals), None);
        }
    }
    let names: Vec<String> = raw.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let ids = raw
        .iter()
        .map(|s| names.binary_search(s).expect("name is in the set") as i64)
        .collect();
    (Labels::Class(ids), Some(names))
}

/// Writes a fully labeled sample with header `x0,..,x{d-1},label`.
pub fn write_csv<W: Write>(out: W, x: &Matrix, y: &Labels) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..x.cols()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    let fail = |e: csv::Error| Error::Data(format!("csv write failed: {e}"));
    w.write_record(&header).map_err(fail)?;
    for (i, row) in x.row_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(match y {
            Labels::Class(v) => v[i].to_string(),
            Labels::Real(v) => v[i].to_string(),
        });
        w.write_record(&rec).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::Data(format!("csv write failed: {e}")))?;
    Ok(())
}

pub fn save_csv(path: &Path, x: &Matrix, y: &Labels) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, x, y)?;
    let mut file = File::create(path).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(&buf).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_label_cell_means_unlabeled() {
        let d = read_csv("f,label\n1,a\n2,\n3,b\n".as_bytes(), "label").unwrap();
        assert_eq!(d.dataset.y, Labels::Class(vec![0, 1]));
        assert_eq!(d.dataset.unlabeled_x, Matrix::column(&[2.0]));
        assert_eq!(d.class_names, Some(vec!["a".to_string(), "b".to_string()]));
    }

    #[test]
    fn all_empty_labels() {
        let e = read_csv("f,y\n1,\n2,\n".as_bytes(), "y").unwrap_err();
        assert!(e.to_string().contains("zero labeled rows"));
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn bad_number_reports_coordinates() {
        let e = read_csv("a,b,y\n1,2,0\n3,1.2.3,1\n".as_bytes(), "y").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("1.2.3") && msg.contains("row 2") && msg.contains("column 2"), "{msg}");
    }

    #[test]
    fn missing_label_column() {
        assert!(read_csv("a,b\n1,2\n".as_bytes(), "y").is_err());
    }

    #[test]
    fn real_labels_and_round_trip() {
        let x = Matrix::from_rows(&[[0.1, -2.5], [3.0, 1e-7]]).unwrap();
        let y = Labels::Real(vec![0.5, -1.25]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &x, &y).unwrap();
        let back = read_csv(buf.as_slice(), "label").unwrap();
        assert_eq!(back.dataset.x, x);
        assert_eq!(back.dataset.y, y);
        assert_eq!(back.feature_names, vec!["x0", "x1"]);
    }
}
