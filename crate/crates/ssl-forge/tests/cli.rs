use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssl-forge"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).env("SSL_FORGE_THREADS", "2").output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const RUN: &str = r#"{
    "dataset": {"synthetic": {"kind": "two_moons", "params": {"n": 120, "noise": 0.1}}},
    "split": {"n_labeled": 10},
    "algorithm": {"name": "label_spreading", "params": {"k": 7}},
    "metrics": ["accuracy", "f1_macro"]
}"#;

#[test]
fn gen_writes_header_plus_rows_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = run(&["gen", "two_moons", "--seed", "3"], dir.path());
    let b = run(&["gen", "two_moons", "--seed", "3"], dir.path());
    let c = run(&["gen", "two_moons", "--seed", "4"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a).lines().count(), 201);
    assert_eq!(stdout(&a).lines().next(), Some("x0,x1,label"));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_to_file_with_params() {
    let dir = TempDir::new().unwrap();
    let o = run(&["gen", "blobs", "-p", "n=30", "-p", "k=4", "--out", "b.csv", "--quiet"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(text.lines().count(), 31);
}

#[test]
fn unknown_generator_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(&["gen", "spirals"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["gen", "blobs", "-p", "bogus=1"], dir.path()).status.code(), Some(2));
}

#[test]
fn run_emits_json_result() {
    let dir = TempDir::new().unwrap();
    write(&dir, "run.json", RUN);
    let o = run(&["run", "--config", "run.json", "--quiet"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let acc = doc["metrics"]["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    assert!(doc["diagnostics"]["converged"].is_boolean());
    assert_eq!(doc["algorithm"], "label_spreading");
    assert_eq!(doc["n_labeled"], 10);
    assert_eq!(doc["n_evaluated"], 110);
}

#[test]
fn run_table_and_csv_formats() {
    let dir = TempDir::new().unwrap();
    write(&dir, "run.json", RUN);
    let csv = run(&["run", "--config", "run.json", "--format", "csv", "--quiet"], dir.path());
    let text = stdout(&csv);
    assert_eq!(text.lines().next(), Some("metric,value"));
    assert_eq!(text.lines().count(), 3);
    let table = run(&["run", "--config", "run.json", "--format", "table", "--quiet"], dir.path());
    assert!(stdout(&table).contains("accuracy"));
}

#[test]
fn predictions_file_round_trips_through_eval() {
    let dir = TempDir::new().unwrap();
    write(&dir, "run.json", RUN);
    let o = run(&["run", "--config", "run.json", "--predictions", "p.csv", "--quiet"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let e = run(&["eval", "--input", "p.csv", "--metrics", "accuracy,f1_macro", "--quiet"], dir.path());
    assert_eq!(e.status.code(), Some(0), "{}", String::from_utf8_lossy(&e.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&e.stdout).unwrap();
    assert_eq!(rep["metrics"]["accuracy"], doc["metrics"]["accuracy"]);
    assert_eq!(rep["metrics"]["f1_macro"], doc["metrics"]["f1_macro"]);
    assert_eq!(rep["n"], 110);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    write(&dir, "run.json", RUN);
    let a = run(&["run", "--config", "run.json", "--seed", "9", "--quiet"], dir.path());
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["seed"], 9);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // usage error
    assert_eq!(run(&["run"], dir.path()).status.code(), Some(2));
    // missing config file
    assert_eq!(run(&["run", "--config", "nope.json"], dir.path()).status.code(), Some(2));
    // unknown field
    write(&dir, "bad.json", &RUN.replace("\"metrics\"", "\"metricz\""));
    assert_eq!(run(&["run", "--config", "bad.json"], dir.path()).status.code(), Some(2));
    // unknown algorithm
    write(&dir, "alg.json", &RUN.replace("label_spreading", "label_smearing"));
    assert_eq!(run(&["run", "--config", "alg.json"], dir.path()).status.code(), Some(2));
    // bad CSV cell
    write(&dir, "d.csv", "a,b,label\n1,2,0\n3,x,1\n5,6,\n");
    let csv_cfg = r#"{"dataset": {"csv": {"path": "d.csv", "label_column": "label"}},
        "split": {"n_labeled": 1}, "algorithm": {"name": "knn"}}"#;
    write(&dir, "csv.json", csv_cfg);
    let o = run(&["run", "--config", "csv.json"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
    // infeasible constraints
    let infeasible = r#"{"dataset": {"synthetic": {"kind": "blobs", "params": {"n": 30}}},
        "split": {"n_labeled": 3},
        "algorithm": {"name": "constrained_kmeans",
                      "params": {"k": 3, "must_link": [[0, 1]], "cannot_link": [[0, 1]]}}}"#;
    write(&dir, "inf.json", infeasible);
    let o = run(&["run", "--config", "inf.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0, 1)"));
}

#[test]
fn invalid_thread_count_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = bin()
        .args(["gen", "blobs"])
        .current_dir(dir.path())
        .env("SSL_FORGE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

const SUITE: &str = r#"{
    "datasets": [
        {"name": "moons", "dataset": {"synthetic": {"kind": "two_moons", "params": {"n": 80}}},
         "split": {"n_labeled": 8}},
        {"name": "blobs", "dataset": {"synthetic": {"kind": "blobs", "params": {"n": 60, "k": 2}}},
         "split": {"n_labeled": 6}}
    ],
    "algorithms": [
        {"name": "label_propagation"},
        {"label": "broken", "name": "constrained_kmeans",
         "params": {"k": 2, "must_link": [[0, 1]], "cannot_link": [[1, 0]]}}
    ],
    "seeds": [0, 1, 2]
}"#;

#[test]
fn bench_reports_every_row_and_marks_failures() {
    let dir = TempDir::new().unwrap();
    write(&dir, "suite.json", SUITE);
    let o = run(&["bench", "--config", "suite.json", "--quiet"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let names: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r["dataset"].as_str().unwrap(), r["algorithm"].as_str().unwrap()))
        .collect();
    assert_eq!(
        names,
        [("moons", "label_propagation"), ("moons", "broken"), ("blobs", "label_propagation"), ("blobs", "broken")]
    );
    for r in rows {
        if r["algorithm"] == "broken" {
            assert_eq!(r["status"], "failed");
            assert!(r["error"].as_str().unwrap().starts_with("seed 0:"));
        } else {
            assert_eq!(r["status"], "ok");
            assert_eq!(r["seeds"].as_array().unwrap().len(), 3);
            let acc = &r["metrics"]["accuracy"];
            assert!(acc["mean"].as_f64().unwrap() > 0.5);
            assert!(acc["std"].as_f64().unwrap() >= 0.0);
        }
    }

    let table = run(&["bench", "--config", "suite.json", "--format", "table", "--quiet"], dir.path());
    assert!(stdout(&table).contains("FAILED"));
    let csv = run(&["bench", "--config", "suite.json", "--format", "csv", "--quiet"], dir.path());
    assert!(stdout(&csv).lines().next().unwrap().contains("accuracy_mean,accuracy_std"));
}

#[test]
fn bench_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    write(&dir, "suite.json", SUITE);
    let strip = |o: Output| {
        let mut doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        for r in doc["rows"].as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("wall_time_s");
        }
        doc
    };
    let one = bin()
        .args(["bench", "--config", "suite.json", "--quiet"])
        .current_dir(dir.path())
        .env("SSL_FORGE_THREADS", "1")
        .output()
        .unwrap();
    let four = bin()
        .args(["bench", "--config", "suite.json", "--quiet"])
        .current_dir(dir.path())
        .env("SSL_FORGE_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(strip(one), strip(four));
}

#[test]
fn empty_suite_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    write(&dir, "empty.json", r#"{"datasets": [], "algorithms": []}"#);
    assert_eq!(run(&["bench", "--config", "empty.json"], dir.path()).status.code(), Some(2));
}
