//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ssl_forge::config::{parse_json, ExperimentConfig};
use ssl_forge::runner::run_experiment;
use ssl_forge_core::base::BaseLearnerSpec;
use ssl_forge_core::cluster::{constrained_kmeans_fit, CopKmeansConfig, PairConstraints};
use ssl_forge_core::data::{gen_blobs, gen_linear, gen_two_moons, split_labeled_unlabeled};
use ssl_forge_core::disagreement::{tri_decide, tri_training_fit, TriDecision, TriTrainingConfig};
use ssl_forge_core::ensemble::{assemble_fit, AssembleConfig};
use ssl_forge_core::estimator::FittedAlgorithm;
use ssl_forge_core::gmm::{ssgmm_fit, SsgmmConfig};
use ssl_forge_core::graph::{build_knn_graph, default_gamma, label_spreading, GraphMode, PropagationConfig};
use ssl_forge_core::metrics::{classification_metrics, clustering_metrics, regression_metrics, Metric, MetricReport};
use ssl_forge_core::model_selection::{grid_candidates, SearchConfig, SearchPlan};
use ssl_forge_core::neural::{mse, softmax_cross_entropy, Mlp};
use ssl_forge_core::svm::{tsvm_fit, TsvmConfig};
use ssl_forge_core::{
    fit, validate, Algorithm, EstimatorSpec, ErrorKind, Labels, Matrix, ParamMap, ParamValue, Rng, SslDataset,
    TaskKind, TrainingSet,
};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn classification_set(x: Matrix, y: Vec<i64>, u: Matrix) -> TrainingSet {
    validate(&SslDataset::new(x, Labels::Class(y), u), TaskKind::Classification).expect("valid fixture")
}

fn split(x: &Matrix, y: &Labels, n_labeled: usize, seed: u64) -> SslDataset {
    split_labeled_unlabeled(x, y, n_labeled, matches!(y, Labels::Class(_)), seed)
        .expect("feasible split")
        .dataset
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

// 1
fn api_unification() -> Check {
    let start = Instant::now();
    let (mx, my) = gen_two_moons(120, 0.1, 11);
    let moons = split(&mx, &my, 10, 11);
    let lin = gen_linear(120, 2, 0.05, 11);
    let linear = split(&lin.x, &Labels::Real(lin.y.as_real().unwrap().to_vec()), 10, 11);
    let (bx, by) = gen_blobs(90, 3, 1.0, 11);
    let blobs = split(&bx, &by, 9, 11);
    let probe = gen_two_moons(7, 0.1, 99).0;
    for alg in Algorithm::SEMI_SUPERVISED {
        let d = match alg.task() {
            TaskKind::Classification => &moons,
            TaskKind::Regression => &linear,
            TaskKind::Clustering => &blobs,
        };
        let spec = ok(EstimatorSpec::new(alg.name(), ParamMap::new()))?;
        let model = fit(&spec, d, 3).map_err(|e| format!("{}: fit: {e}", alg.name()))?;
        for q in [&d.unlabeled_x, &probe] {
            let p = model.predict(q).map_err(|e| format!("{}: predict: {e}", alg.name()))?;
            ensure(p.len() == q.rows(), || format!("{}: {} predictions for {} rows", alg.name(), p.len(), q.rows()))?;
            match (&p.labels, alg.task()) {
                (Labels::Real(v), TaskKind::Regression) => {
                    ensure(v.iter().all(|x| x.is_finite()), || format!("{}: non-finite output", alg.name()))?
                }
                (Labels::Class(v), TaskKind::Classification | TaskKind::Clustering) => {
                    let known = model.classes();
                    ensure(v.iter().all(|c| known.contains(c)), || format!("{}: unknown class", alg.name()))?
                }
                _ => return Err(format!("{}: output kind does not match task", alg.name())),
            }
            if let Some(s) = &p.scores {
                for r in s.row_iter() {
                    let sum: f64 = r.iter().sum();
                    ensure((sum - 1.0).abs() < 1e-9, || format!("{}: score row sums to {sum}", alg.name()))?;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("16 algorithms, {secs:.2}s"))
}

/// Dense Gaussian elimination with partial pivoting, solving `A X = B`.
fn solve_dense(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows();
    let m = b.cols();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| a.row(i).iter().chain(b.row(i)).copied().collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        aug.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = aug[r][col] / aug[col][col];
                if f != 0.0 {
                    for c in col..n + m {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    let mut x = Matrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            x[(i, j)] = aug[i][n + j] / aug[i][i];
        }
    }
    x
}

// 2
fn graph_oracle() -> Check {
    let mut worst = 0.0f64;
    for g in 0..20u64 {
        let mut rng = Rng::new(1000 + g);
        let n = 10 + rng.below(41);
        let x = Matrix::from_vec(n, 2, (0..2 * n).map(|_| rng.uniform_range(-2.0, 2.0)).collect()).unwrap();
        let k = 3 + rng.below(5);
        let mode = if g % 2 == 0 { GraphMode::Rbf } else { GraphMode::Connectivity };
        let graph = ok(build_knn_graph(&x, k, mode, default_gamma(&x)))?;
        let classes = 2 + rng.below(2);
        let seeds: Vec<Option<usize>> = (0..n)
            .map(|i| (i < classes || rng.uniform() < 0.2).then(|| i % classes))
            .collect();
        let alpha = rng.uniform_range(0.1, 0.95);
        let cfg = PropagationConfig {
            tol: 1e-10,
            max_iter: 1_000_000,
        };
        let res = ok(label_spreading(&graph, &seeds, classes, alpha, cfg))?;
        ensure(res.converged, || format!("graph {g} did not converge"))?;

        let w = graph.to_dense();
        let deg: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
        let mut a = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if deg[i] > 0.0 && deg[j] > 0.0 {
                    a[(i, j)] -= alpha * w[(i, j)] / (deg[i] * deg[j]).sqrt();
                }
            }
        }
        let mut y = Matrix::zeros(n, classes);
        for (i, s) in seeds.iter().enumerate() {
            if let Some(c) = s {
                y[(i, *c)] = 1.0 - alpha;
            }
        }
        let f = solve_dense(&a, &y);
        let diff = f.max_abs_diff(&res.raw);
        worst = worst.max(diff);
        ensure(diff < 1e-6, || format!("graph {g} (n={n}): max-abs {diff:e}"))?;
    }
    Ok(format!("20 graphs, worst max-abs {worst:.2e}"))
}

// 3
fn em_monotonicity() -> Check {
    let cfg = SsgmmConfig::default();
    let mut steps = 0;
    for s in 0..10u64 {
        let k = 2 + (s as usize % 2);
        let (x, y) = gen_blobs(60, k, 3.0, 200 + s);
        let yv = y.as_class().unwrap();
        let lab: Vec<usize> = (0..60).step_by(6).collect();
        let unl: Vec<usize> = (0..60).filter(|i| i % 6 != 0).collect();
        let t = classification_set(
            x.select_rows(&lab),
            lab.iter().map(|&i| yv[i]).collect(),
            x.select_rows(&unl),
        );
        let g = ok(ssgmm_fit(&t, cfg))?;
        for w in g.log_likelihood.windows(2) {
            ensure(w[1] >= w[0] - 1e-9, || format!("dataset {s}: log-likelihood fell {} -> {}", w[0], w[1]))?;
            steps += 1;
        }
    }

    let mut worst = 0.0f64;
    for s in 0..5u64 {
        let (x, y) = gen_blobs(40, 2, 1.5, 300 + s);
        let yv = y.as_class().unwrap().to_vec();
        let t = classification_set(x.clone(), yv.clone(), Matrix::zeros(0, 2));
        let g = ok(ssgmm_fit(&t, cfg))?;
        for (c, comp) in g.components.iter().enumerate() {
            let rows: Vec<usize> = (0..yv.len()).filter(|&i| yv[i] == c as i64).collect();
            let m = rows.len() as f64;
            let mean: Vec<f64> = (0..2).map(|j| rows.iter().map(|&i| x[(i, j)]).sum::<f64>() / m).collect();
            worst = worst.max((comp.weight - m / yv.len() as f64).abs());
            for j in 0..2 {
                worst = worst.max((comp.mean[j] - mean[j]).abs());
                for l in 0..2 {
                    let cov = rows.iter().map(|&i| (x[(i, j)] - mean[j]) * (x[(i, l)] - mean[l])).sum::<f64>() / m
                        + if j == l { cfg.reg } else { 0.0 };
                    worst = worst.max((comp.cov[(j, l)] - cov).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("supervised reduction off by {worst:e}"))?;
    Ok(format!("{steps} EM steps monotone; class MLE within {worst:.1e}"))
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

// 4
fn gradient_check() -> Check {
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut n_params = 0;
    for probe in 0..10u64 {
        let mut rng = Rng::new(500 + probe);
        let net = ok(Mlp::new(&[4, 8, 3], &mut rng))?;
        let x = Matrix::from_vec(6, 4, (0..24).map(|_| rng.normal()).collect()).unwrap();
        let targets: Vec<usize> = (0..6).map(|_| rng.below(3)).collect();
        let reg_t = Matrix::from_vec(6, 3, (0..18).map(|_| rng.normal()).collect()).unwrap();

        for loss_kind in 0..2 {
            let loss = |m: &Mlp| -> f64 {
                let out = m.output(&x).unwrap();
                if loss_kind == 0 {
                    softmax_cross_entropy(&out, &targets).0
                } else {
                    mse(&out, &reg_t).0
                }
            };
            let fwd = ok(net.forward(&x))?;
            let d = if loss_kind == 0 {
                softmax_cross_entropy(fwd.output(), &targets).1
            } else {
                mse(fwd.output(), &reg_t).1
            };
            let grads = net.backward(&fwd, &d);
            n_params = grads.len();
            for p in 0..net.params().len() {
                let mut plus = net.clone();
                plus.params_mut()[p] += h;
                let mut minus = net.clone();
                minus.params_mut()[p] -= h;
                let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let e = relative_error(grads[p], fd);
                worst = worst.max(e);
                ensure(e < 1e-4, || {
                    format!("probe {probe}, loss {loss_kind}, param {p}: analytic {} vs numeric {fd}", grads[p])
                })?;
            }
        }
    }
    Ok(format!("{n_params} parameters x 10 probes x 2 losses, worst relative error {worst:.2e}"))
}

// 5
fn tsvm_descent() -> Check {
    let mut rng = Rng::new(77);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..60 {
        let c = i % 2;
        let cx = if c == 1 { 1.2 } else { -1.2 };
        rows.push([cx + rng.normal(), rng.normal()]);
        labels.push(c as i64);
    }
    let x = Matrix::from_rows(&rows).unwrap();
    let lab = [0usize, 1, 2, 3];
    let unl: Vec<usize> = (4..60).collect();
    let t = classification_set(
        x.select_rows(&lab),
        lab.iter().map(|&i| labels[i]).collect(),
        x.select_rows(&unl),
    );
    let cfg = TsvmConfig {
        c_u: 1.0,
        ..TsvmConfig::default()
    };
    let m = ok(tsvm_fit(&t, cfg))?;
    ensure(!m.swaps.is_empty(), || "the 60-point instance made no swaps".into())?;
    for (i, s) in m.swaps.iter().enumerate() {
        ensure(s.objective_after < s.objective_before, || {
            format!("swap {i}: {} -> {}", s.objective_before, s.objective_after)
        })?;
    }

    let u: Vec<f64> = (0..10)
        .flat_map(|i| {
            let v = 0.5 + 0.15 * i as f64;
            [v, -v]
        })
        .collect();
    let gap = classification_set(Matrix::column(&[-1.0, 1.0]), vec![0, 1], Matrix::column(&u));
    let g = ok(tsvm_fit(&gap, TsvmConfig::default()))?;
    let ratio = (g.svm.b / g.svm.w[0]).abs();
    ensure(ratio < 0.1, || format!("gap instance |b/w| = {ratio}"))?;
    Ok(format!("{} swaps all strictly decreasing; gap |b/w| = {ratio:.3e}", m.swaps.len()))
}

/// Brute-force weighted stump: constant stump first, then features and
/// midpoints in ascending order, replacing only on a strictly lower error.
fn oracle_stump(x: &Matrix, y: &[usize], w: &[f64]) -> Vec<usize> {
    let n = y.len();
    let total: f64 = w.iter().sum();
    let side_class = |rows: &mut dyn Iterator<Item = usize>| {
        let mut mass = [0.0f64; 2];
        for i in rows {
            mass[y[i]] += w[i];
        }
        usize::from(mass[1] > mass[0])
    };
    let error = |pred: &[usize]| -> f64 { (0..n).filter(|&i| pred[i] != y[i]).map(|i| w[i]).sum() };
    let c = side_class(&mut (0..n));
    let mut best = vec![c; n];
    let mut best_err = error(&best);
    for j in 0..x.cols() {
        let mut vals: Vec<f64> = (0..n).map(|i| x[(i, j)]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for pair in vals.windows(2) {
            let thr = 0.5 * (pair[0] + pair[1]);
            let left = side_class(&mut (0..n).filter(|&i| x[(i, j)] <= thr));
            let right = side_class(&mut (0..n).filter(|&i| x[(i, j)] > thr));
            let pred: Vec<usize> = (0..n).map(|i| if x[(i, j)] <= thr { left } else { right }).collect();
            let err = error(&pred);
            if err < best_err - 1e-12 * total {
                best_err = err;
                best = pred;
            }
        }
    }
    best
}

fn oracle_adaboost(x: &Matrix, y: &[usize], rounds: usize) -> Vec<f64> {
    let n = y.len();
    let mut w = vec![1.0 / n as f64; n];
    let mut alphas = Vec::new();
    for _ in 0..rounds {
        let pred = oracle_stump(x, y, &w);
        let eps: f64 = (0..n).filter(|&i| pred[i] != y[i]).map(|i| w[i]).sum();
        if eps >= 0.5 {
            break;
        }
        if eps <= 0.0 {
            alphas.push(10.0);
            break;
        }
        let a = (0.5 * ((1.0 - eps) / eps).ln()).min(10.0);
        alphas.push(a);
        for i in 0..n {
            w[i] *= if pred[i] == y[i] { (-a).exp() } else { a.exp() };
        }
        let z: f64 = w.iter().sum();
        for v in &mut w {
            *v /= z;
        }
    }
    alphas
}

// 6
fn boosting_reduction() -> Check {
    let stump = ok(BaseLearnerSpec::parse("decision_stump", &ParamMap::new()))?;
    let mut worst = 0.0f64;
    let mut total = 0;
    for s in 0..5u64 {
        let mut rng = Rng::new(600 + s);
        let x = Matrix::from_vec(50, 2, (0..100).map(|_| rng.normal()).collect()).unwrap();
        let y: Vec<usize> = x.row_iter().map(|r| usize::from(r[0] * r[0] - r[1] > 0.2)).collect();
        let t = classification_set(x.clone(), y.iter().map(|&c| c as i64).collect(), Matrix::zeros(0, 2));
        let ens = ok(assemble_fit(&t, &stump, AssembleConfig { rounds: 25, beta: 1.0 }))?;
        let got = ens.alphas();
        let want = oracle_adaboost(&x, &y, 25);
        ensure(got.len() == want.len(), || format!("instance {s}: {} rounds vs {}", got.len(), want.len()))?;
        for (a, b) in got.iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
        total += got.len();
    }
    ensure(worst < 1e-9, || format!("alpha mismatch {worst:e}"))?;
    Ok(format!("{total} rounds over 5 instances, max |dalpha| {worst:.1e}"))
}

// 7
fn tri_training_bookkeeping() -> Check {
    let (d, l) = tri_decide(0.2, 0.3, 0, 100);
    ensure(l == 3, || format!("l_prev initialized to {l}, expected 3"))?;
    ensure(d == TriDecision::Subsample(4), || format!("{d:?}"))?;
    let (d, l) = tri_decide(0.2, 0.3, 10, 20);
    ensure(d == TriDecision::Subsample(14) && l == 10, || format!("subsample case gave {d:?}"))?;
    ensure(tri_decide(0.25, 0.2, 5, 50).0 == TriDecision::Skip, || "no improvement must skip".into())?;
    ensure(tri_decide(0.1, 0.3, 10, 20).0 == TriDecision::Accept, || "0.1*20 < 3 must accept".into())?;

    let base = ok(BaseLearnerSpec::parse("decision_stump", &ParamMap::new()))?;
    let mut updates = 0;
    for s in 0..5u64 {
        let (x, y) = gen_two_moons(200, 0.15, 700 + s);
        let d = split(&x, &y, 20, 700 + s);
        let t = ok(validate(&d, TaskKind::Classification))?;
        let m = ok(tri_training_fit(&t, &base, TriTrainingConfig { seed: s, max_rounds: 100 }))?;
        for u in &m.updates {
            ensure(u.e_t * (u.l_t as f64) < u.e_prev * (u.l_prev as f64), || format!("seed {s}: {u:?}"))?;
        }
        updates += m.updates.len();
    }
    ensure(updates > 0, || "no accepted updates to check".into())?;
    Ok(format!("worked cases exact; {updates} accepted updates satisfy the bound"))
}

fn kmeans_cost(x: &Matrix, a: &[usize], c: &Matrix) -> f64 {
    x.row_iter()
        .zip(a)
        .map(|(r, &k)| r.iter().zip(c.row(k)).map(|(p, q)| (p - q) * (p - q)).sum::<f64>())
        .sum()
}

// 8
fn constrained_clustering() -> Check {
    let mut iters = 0;
    for s in 0..10u64 {
        let (x, y) = gen_blobs(60, 3, 2.0, 800 + s);
        let yv = y.as_class().unwrap();
        let mut rng = Rng::new(800 + s);
        let mut cons = PairConstraints::default();
        for _ in 0..15 {
            let (i, j) = (rng.below(60), rng.below(60));
            if i == j {
                continue;
            }
            if yv[i] == yv[j] {
                cons.must_link.push((i, j));
            } else {
                cons.cannot_link.push((i, j));
            }
        }
        let cfg = CopKmeansConfig {
            seed: s,
            ..CopKmeansConfig::new(3)
        };
        let r = ok(constrained_kmeans_fit(&x, &cons, cfg))?;
        ensure(cons.satisfied_by(&r.assignments), || format!("instance {s}: constraint violated"))?;
        for w in r.objective_trace.windows(2) {
            ensure(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), || format!("instance {s}: {} -> {}", w[0], w[1]))?;
        }
        let cost = kmeans_cost(&x, &r.assignments, &r.centroids);
        ensure((cost - r.objective).abs() <= 1e-9 * cost.max(1.0), || {
            format!("instance {s}: reported objective {} vs {cost}", r.objective)
        })?;
        iters += r.objective_trace.len();
    }

    let x = Matrix::column(&[0.0, 0.1, 5.0, 5.1]);
    let d = SslDataset::new(x.select_rows(&[0]), Labels::Class(vec![0]), x.select_rows(&[1, 2, 3]));
    let params = ParamMap::new()
        .with("k", 2)
        .with("must_link", vec![vec![0, 1]])
        .with("cannot_link", vec![vec![1, 0]]);
    let e = fit(&ok(EstimatorSpec::new("constrained_kmeans", params))?, &d, 0)
        .err()
        .ok_or("infeasible fit succeeded")?;
    ensure(e.kind() == ErrorKind::Algorithm, || format!("library error kind {:?}", e.kind()))?;

    let dir = ok(tempfile::tempdir())?;
    let cfg_path = dir.path().join("infeasible.json");
    let cfg = r#"{
        "dataset": {"synthetic": {"kind": "blobs", "params": {"n": 30, "k": 2}}},
        "split": {"n_labeled": 4},
        "algorithm": {"name": "constrained_kmeans",
                      "params": {"k": 2, "must_link": [[0, 7]], "cannot_link": [[7, 0]]}}
    }"#;
    ok(std::fs::write(&cfg_path, cfg))?;
    let out = ok(Command::new(env!("CARGO_BIN_EXE_ssl-forge"))
        .args(["run", "--quiet", "--config"])
        .arg(&cfg_path)
        .output())?;
    let code = out.status.code();
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(code == Some(4), || format!("CLI exit {code:?}, stderr {stderr}"))?;
    ensure(stderr.contains("(7, 0)"), || format!("diagnostic does not name the pair: {stderr}"))?;
    Ok(format!("10 instances ({iters} iterations) feasible and monotone; infeasible CLI run exits 4"))
}

fn experiment(dataset: &str, n_labeled: usize, algorithm: &str, seed: u64) -> std::result::Result<f64, String> {
    let text = format!(
        r#"{{"dataset": {dataset}, "split": {{"n_labeled": {n_labeled}}},
            "algorithm": {{"name": "{algorithm}"}}, "seed": {seed}}}"#
    );
    let cfg: ExperimentConfig = ok(parse_json(&text))?;
    let start = Instant::now();
    let r = run_experiment(&cfg, seed).map_err(|e| format!("{algorithm} seed {seed}: {e}"))?.result;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(30), || format!("{algorithm} seed {seed} took {took:?}"))?;
    let key = if r.task == TaskKind::Regression { "mse" } else { "accuracy" };
    r.metrics.get(key).copied().ok_or_else(|| format!("{algorithm}: no {key}"))
}

fn median_over_seeds(dataset: &str, n_labeled: usize, algorithm: &str) -> std::result::Result<f64, String> {
    let v = (0..5).map(|s| experiment(dataset, n_labeled, algorithm, s)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(median(v))
}

// 9
fn ssl_benefit() -> Check {
    let moons = r#"{"synthetic": {"kind": "two_moons", "params": {"n": 200, "noise": 0.05}}}"#;
    let spreading = median_over_seeds(moons, 2, "label_spreading")?;
    ensure(spreading >= 0.95, || format!("label_spreading median accuracy {spreading}"))?;
    let mlp = median_over_seeds(moons, 10, "mlp")?;
    let pi = median_over_seeds(moons, 10, "pi_model")?;
    let mt = median_over_seeds(moons, 10, "mean_teacher")?;
    ensure(pi >= mlp - 0.02, || format!("pi_model {pi} vs mlp {mlp}"))?;
    ensure(mt >= mlp - 0.02, || format!("mean_teacher {mt} vs mlp {mlp}"))?;
    let linear = r#"{"synthetic": {"kind": "linear", "params": {"n": 200, "noise": 0.0}}}"#;
    let coreg = median_over_seeds(linear, 10, "coreg")?;
    let knn = median_over_seeds(linear, 10, "knn_regressor")?;
    ensure(coreg <= knn, || format!("coreg mse {coreg} vs knn mse {knn}"))?;
    Ok(format!(
        "spreading {spreading:.3}; mlp {mlp:.3}, pi {pi:.3}, mean teacher {mt:.3}; coreg mse {coreg:.4} vs knn {knn:.4}"
    ))
}

fn student_params(spec: &EstimatorSpec, d: &SslDataset) -> std::result::Result<Vec<u64>, String> {
    let m = ok(fit(spec, d, 42))?;
    match m.state() {
        FittedAlgorithm::Neural(n) => Ok(n.student.params().iter().map(|v| v.to_bits()).collect()),
        _ => Err(format!("{} is not neural", spec.name())),
    }
}

// 10
fn strategy_collapse() -> Check {
    let short = || ParamMap::new().with("epochs", 15).with("hidden", vec![16]);
    let (x, y) = gen_two_moons(120, 0.1, 9);
    let cls = split(&x, &y, 12, 9);
    let lin = gen_linear(120, 2, 0.1, 9);
    let reg = split(&lin.x, &lin.y, 12, 9);
    let cases = [
        ("mlp", "pseudo_label", "alpha_f", &cls),
        ("mlp", "pi_model", "w_max", &cls),
        ("mlp", "mean_teacher", "w_max", &cls),
        ("mlp_regressor", "pi_model_reg", "w_max", &reg),
    ];
    for (sup, ssl, weight, d) in cases {
        let base = student_params(&ok(EstimatorSpec::new(sup, short()))?, d)?;
        let zero = student_params(&ok(EstimatorSpec::new(ssl, short().with(weight, 0.0)))?, d)?;
        ensure(base == zero, || format!("{ssl} with {weight}=0 differs from {sup}"))?;
        let on = student_params(&ok(EstimatorSpec::new(ssl, short()))?, d)?;
        ensure(base != on, || format!("{ssl} with default weight is identical to {sup}"))?;
    }
    Ok("4 strategies bit-identical to supervised at zero weight".into())
}

// 11
fn search_correctness() -> Check {
    let (x, y) = gen_two_moons(80, 0.2, 13);
    let d = split(&x, &y, 30, 13);
    let grid = vec![
        ("alpha".to_string(), vec![ParamValue::Real(0.2), ParamValue::Real(0.9)]),
        ("k".to_string(), vec![ParamValue::Int(2), ParamValue::Int(5), ParamValue::Int(9)]),
    ];
    let candidates = ok(grid_candidates(&grid))?;
    ensure(candidates.len() == 6, || format!("{} candidates", candidates.len()))?;
    let base = ok(EstimatorSpec::new("label_spreading", ParamMap::new()))?;
    let mut sc = SearchConfig::new(Metric::Accuracy);
    sc.folds = 5;
    sc.seed = 4;
    let plan = ok(SearchPlan::new(base.clone(), candidates.clone(), d.clone(), sc))?;
    let serial = ok(plan.run_serial())?;
    let pool = ok(rayon::ThreadPoolBuilder::new().num_threads(4).build())?;
    let parallel = ok(pool.install(|| ssl_forge::search::run_parallel(&plan)))?;
    ensure(serial == parallel, || "serial and parallel results differ".into())?;

    let yv = d.y.as_class().unwrap();
    let mut means = Vec::new();
    for c in &candidates {
        let spec = ok(base.with_params(c))?;
        let mut scores = Vec::new();
        for f in plan.folds() {
            let train = SslDataset::new(d.x.select_rows(&f.train), d.y.select(&f.train), d.unlabeled_x.clone());
            let m = ok(fit(&spec, &train, 4))?;
            let p = ok(m.predict(&d.x.select_rows(&f.test)))?;
            let pv = p.labels.as_class().unwrap();
            let hits = f.test.iter().zip(pv).filter(|(&i, &q)| yv[i] == q).count();
            scores.push(hits as f64 / f.test.len() as f64);
        }
        means.push(scores.iter().sum::<f64>() / scores.len() as f64);
    }
    let mut best = 0;
    for (i, m) in means.iter().enumerate() {
        if *m > means[best] {
            best = i;
        }
    }
    ensure(best == serial.best_index, || format!("search picked {}, exhaustive argmax {best}", serial.best_index))?;
    for (c, m) in serial.candidates.iter().zip(&means) {
        ensure((c.mean - m).abs() < 1e-12, || format!("candidate mean {} vs re-evaluated {m}", c.mean))?;
    }
    Ok(format!("best {} (mean accuracy {:.3}); serial == parallel", serial.best_index, means[best]))
}

fn close(rep: &MetricReport, m: Metric, want: f64) -> std::result::Result<(), String> {
    let got = rep.get(m).ok_or_else(|| format!("{} missing", m.name()))?;
    ensure((got - want).abs() < 1e-9, || format!("{}: {got} vs {want}", m.name()))
}

// 12
fn metrics_fixtures() -> Check {
    let scores = Matrix::from_rows(&[
        [0.7, 0.2, 0.1],
        [0.4, 0.5, 0.1],
        [0.1, 0.8, 0.1],
        [0.3, 0.6, 0.1],
        [0.2, 0.2, 0.6],
        [0.5, 0.3, 0.2],
    ])
    .unwrap();
    let c = ok(classification_metrics(&[0, 0, 1, 1, 2, 2], &[0, 1, 1, 1, 2, 0], Some((&scores, &[0, 1, 2]))))?;
    close(&c, Metric::Accuracy, 2.0 / 3.0)?;
    close(&c, Metric::PrecisionMacro, 13.0 / 18.0)?;
    close(&c, Metric::RecallMacro, 2.0 / 3.0)?;
    close(&c, Metric::F1Macro, 59.0 / 90.0)?;
    close(&c, Metric::F1Micro, 2.0 / 3.0)?;
    let ll = -[0.7f64, 0.4, 0.8, 0.6, 0.6, 0.2].iter().map(|p| p.ln()).sum::<f64>() / 6.0;
    close(&c, Metric::LogLoss, ll)?;
    close(&c, Metric::TopKAccuracy, 5.0 / 6.0)?;

    let r = ok(regression_metrics(&[3.0, -0.5, 2.0, 7.0], &[2.5, 0.0, 2.0, 8.0]))?;
    close(&r, Metric::Mse, 0.375)?;
    close(&r, Metric::Rmse, 0.375f64.sqrt())?;
    close(&r, Metric::Mae, 0.5)?;
    close(&r, Metric::R2, 443.0 / 467.0)?;
    close(&r, Metric::Mape, 55.0 / 168.0)?;

    let k = ok(clustering_metrics(&[0, 0, 0, 1, 1, 1], &[0, 0, 1, 1, 2, 2]))?;
    close(&k, Metric::Ari, 8.0 / 33.0)?;
    close(&k, Metric::Nmi, 4.0 * 2f64.ln() / (3.0 * 6f64.ln()))?;
    close(&k, Metric::Fmi, 2f64.sqrt() / 3.0)?;
    close(&k, Metric::Purity, 5.0 / 6.0)?;

    for trial in 0..100u64 {
        let mut rng = Rng::new(1200 + trial);
        let n = 5 + rng.below(30);
        let kc = 2 + rng.below(3);
        let t: Vec<i64> = (0..n).map(|_| rng.below(kc) as i64).collect();
        let p: Vec<i64> = (0..n).map(|_| rng.below(kc) as i64).collect();
        let mut s = Matrix::zeros(n, kc);
        for i in 0..n {
            let raw: Vec<f64> = (0..kc).map(|_| rng.uniform() + 1e-3).collect();
            let z: f64 = raw.iter().sum();
            for j in 0..kc {
                s[(i, j)] = raw[j] / z;
            }
        }
        let classes: Vec<i64> = (0..kc as i64).collect();
        let tr: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let pr: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let perm = rng.permutation(n);
        let pt: Vec<i64> = perm.iter().map(|&i| t[i]).collect();
        let pp: Vec<i64> = perm.iter().map(|&i| p[i]).collect();
        let ps = s.select_rows(&perm);
        let ptr: Vec<f64> = perm.iter().map(|&i| tr[i]).collect();
        let ppr: Vec<f64> = perm.iter().map(|&i| pr[i]).collect();
        let relabeled: Vec<i64> = p.iter().map(|&c| 10 - 3 * c).collect();

        let pairs = [
            (
                ok(classification_metrics(&t, &p, Some((&s, &classes))))?,
                ok(classification_metrics(&pt, &pp, Some((&ps, &classes))))?,
            ),
            (ok(regression_metrics(&tr, &pr))?, ok(regression_metrics(&ptr, &ppr))?),
            (ok(clustering_metrics(&t, &p))?, ok(clustering_metrics(&pt, &pp))?),
            (ok(clustering_metrics(&t, &p))?, ok(clustering_metrics(&t, &relabeled))?),
        ];
        for (a, b) in &pairs {
            ensure(a.values.len() == b.values.len(), || format!("trial {trial}: metric sets differ"))?;
            for ((m, x), (_, y)) in a.values.iter().zip(&b.values) {
                ensure((x - y).abs() <= 1e-12 * x.abs().max(1.0), || {
                    format!("trial {trial}: {} not invariant ({x} vs {y})", m.name())
                })?;
            }
        }
        for rep in [&pairs[0].0, &pairs[1].0, &pairs[2].0] {
            for &(m, v) in &rep.values {
                let in_range = match m {
                    Metric::LogLoss | Metric::Mse | Metric::Rmse | Metric::Mae | Metric::Mape => v >= 0.0,
                    Metric::R2 => v <= 1.0,
                    Metric::Ari => (-1.0..=1.0).contains(&v),
                    _ => (0.0..=1.0).contains(&v),
                };
                ensure(in_range && v.is_finite(), || format!("trial {trial}: {} = {v} out of range", m.name()))?;
            }
        }
    }
    Ok("16 fixtures exact; 100 random labelings in range and permutation invariant".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("api unification", api_unification),
        ("graph oracle", graph_oracle),
        ("em monotonicity", em_monotonicity),
        ("gradient check", gradient_check),
        ("tsvm descent", tsvm_descent),
        ("boosting reduction", boosting_reduction),
        ("tri-training bookkeeping", tri_training_bookkeeping),
        ("constrained clustering", constrained_clustering),
        ("ssl benefit", ssl_benefit),
        ("strategy collapse", strategy_collapse),
        ("search correctness", search_correctness),
        ("metrics", metrics_fixtures),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2}. {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
