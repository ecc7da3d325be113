use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssl_forge::bench::run_suite;
use ssl_forge::config::{load_json, ExperimentConfig, Format, SuiteConfig};
use ssl_forge::error::{Error, Result};
use ssl_forge::eval::{eval_file, save_predictions};
use ssl_forge::report::{render_bench, render_metrics, render_result};
use ssl_forge::runner::run_experiment;
use ssl_forge::search::{thread_pool, threads_from_env};
use ssl_forge::synthetic::SyntheticKind;
use ssl_forge::table::{save_csv, write_csv};
use ssl_forge_core::{ParamMap, ParamValue, TaskKind};

/// Semi-supervised learning experiments from JSON configs.
///
/// Exit codes: 0 success, 2 configuration error, 3 data error, 4 algorithm
/// failure. SSL_FORGE_THREADS caps the number of worker threads.
#[derive(Parser)]
#[command(name = "ssl-forge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; defaults to the config's choice, else json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Suppress progress and summary lines on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as CSV.
    Gen {
        /// two_moons, blobs or linear.
        kind: String,
        /// Generator parameter as key=value, e.g. -p n=200 -p noise=0.05.
        #[arg(short = 'p', long = "param", value_parser = parse_kv)]
        params: Vec<(String, ParamValue)>,
    },
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Also write held-out truth and predictions as CSV.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Run a suite of experiments over several seeds.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Score a prediction file (columns y_true, y_pred, score_<class>...).
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "classification", value_parser = parse_task)]
        task: TaskKind,
        /// Comma-separated metric names; all metrics of the task when omitted.
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
    },
}

fn parse_kv(s: &str) -> std::result::Result<(String, ParamValue), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let value = if let Ok(i) = v.parse::<i64>() {
        ParamValue::Int(i)
    } else if let Ok(x) = v.parse::<f64>() {
        ParamValue::Real(x)
    } else if let Ok(b) = v.parse::<bool>() {
        ParamValue::Bool(b)
    } else {
        ParamValue::Str(v.to_string())
    };
    Ok((k.to_string(), value))
}

fn parse_task(s: &str) -> std::result::Result<TaskKind, String> {
    match s {
        "classification" => Ok(TaskKind::Classification),
        "regression" => Ok(TaskKind::Regression),
        "clustering" => Ok(TaskKind::Clustering),
        _ => Err(format!("unknown task `{s}`")),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn note(quiet: bool, msg: &str) {
    if !quiet {
        eprintln!("{msg}");
    }
}

fn execute(cli: Cli) -> Result<()> {
    let c = cli.common;
    match cli.command {
        Command::Gen { kind, params } => {
            let kind = SyntheticKind::parse(&kind)?;
            let mut map = ParamMap::new();
            for (k, v) in params {
                map.set(&k, v);
            }
            let (x, y) = kind.generate(&map, c.seed.unwrap_or(0))?;
            match &c.out {
                Some(path) => {
                    save_csv(path, &x, &y)?;
                    note(c.quiet, &format!("wrote {} rows to {}", x.rows(), path.display()));
                }
                None => {
                    let mut buf = Vec::new();
                    write_csv(&mut buf, &x, &y)?;
                    emit(&String::from_utf8_lossy(&buf), None)?;
                }
            }
        }
        Command::Run { config, predictions } => {
            let cfg: ExperimentConfig = load_json(&config)?;
            let seed = c.seed.unwrap_or(cfg.seed);
            let outcome = run_experiment(&cfg, seed)?;
            let r = &outcome.result;
            let out_cfg = cfg.output.clone().unwrap_or_default();
            let format = c.format.unwrap_or(out_cfg.format);
            let out = c.out.or(out_cfg.path);
            emit(&render_result(r, format), out.as_deref())?;
            if let Some(p) = predictions {
                save_predictions(&p, &outcome.truth, &outcome.prediction)?;
            }
            for w in &r.warnings {
                note(c.quiet, &format!("warning: {w}"));
            }
            let summary: Vec<String> = r.metrics.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
            note(
                c.quiet,
                &format!("{} seed {} in {:.3}s: {}", r.algorithm, r.seed, r.wall_time_s, summary.join(" ")),
            );
        }
        Command::Bench { config } => {
            let mut suite: SuiteConfig = load_json(&config)?;
            if let Some(s) = c.seed {
                suite.seeds = vec![s];
            }
            let report = run_suite(&suite)?;
            let out_cfg = suite.output.clone().unwrap_or_default();
            let format = c.format.unwrap_or(out_cfg.format);
            let out = c.out.or(out_cfg.path);
            emit(&render_bench(&report, format), out.as_deref())?;
            note(
                c.quiet,
                &format!("{} rows, {} failed", report.rows.len(), report.failed()),
            );
        }
        Command::Eval { input, task, metrics } => {
            let rep = eval_file(&input, task, &metrics)?;
            let text = match c.format.unwrap_or_default() {
                Format::Json => serde_json::to_string_pretty(&rep).expect("serializable") + "\n",
                f => render_metrics(&rep.metrics, f),
            };
            emit(&text, c.out.as_deref())?;
            for w in &rep.warnings {
                note(c.quiet, &format!("warning: {w}"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads_from_env()
        .and_then(thread_pool)
        .and_then(|pool| pool.install(|| execute(cli)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
