//! Name-based access to every algorithm behind one `fit` / `predict`
//! contract.
//!
//! ```
//! use ssl_forge_core::{fit, EstimatorSpec, Labels, Matrix, ParamMap, SslDataset};
//!
//! let x = Matrix::column(&[0.0, 10.0]);
//! let d = SslDataset::supervised(x, Labels::Class(vec![4, 9]));
//! let spec = EstimatorSpec::new("knn", ParamMap::new().with("k", 1)).unwrap();
//! let model = fit(&spec, &d, 0).unwrap();
//! let p = model.predict(&Matrix::column(&[1.0])).unwrap();
//! assert_eq!(p.labels, Labels::Class(vec![4]));
//! ```

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::base::{BaseClassifier, BaseKind, BaseLearnerSpec, KnnClassifier, KnnConfig, KnnRegressor};
use crate::cluster::{
    constrained_kmeans_fit, constrained_seed_kmeans_fit, ClusteringResult, CopKmeansConfig, PairConstraints,
    SeedKmeansConfig,
};
use crate::coreg::{coreg_fit, CoRegConfig, CoRegModel};
use crate::dataset::{validate, Labels, Output, Prediction, SslDataset, TaskKind, TrainingSet};
use crate::disagreement::{
    co_training_fit, tri_training_fit, CoTrainingConfig, CoTrainingModel, TriTrainingConfig, TriTrainingModel,
    ViewSplit,
};
use crate::ensemble::{assemble_fit, semiboost_fit, AssembleConfig, BoostEnsemble, SemiBoostConfig};
use crate::error::{Error, Result};
use crate::gmm::{ssgmm_fit, GmmState, SsgmmConfig};
use crate::graph::{build_knn_graph, default_gamma, label_propagation, label_spreading, GraphMode, PropagationConfig};
use crate::math;
use crate::matrix::Matrix;
use crate::neural::{trainer_fit, NeuralModel, OptimizerSpec, SchedulerSpec, Strategy, TrainConfig};
use crate::params::{at_least, positive, ParamMap, ParamReader};
use crate::svm::{lapsvm_fit, tsvm_fit, KernelModel, LapSvmConfig, LinearSvmConfig, LinearSvmModel, TsvmConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Knn,
    GaussianNb,
    LogisticRegression,
    DecisionStump,
    Mlp,
    LabelPropagation,
    LabelSpreading,
    Ssgmm,
    Tsvm,
    LapSvm,
    CoTraining,
    TriTraining,
    Assemble,
    SemiBoost,
    PseudoLabel,
    PiModel,
    MeanTeacher,
    KnnRegressor,
    MlpRegressor,
    CoReg,
    PiModelReg,
    ConstrainedKmeans,
    ConstrainedSeedKmeans,
}

impl Algorithm {
    pub const ALL: [Algorithm; 23] = [
        Algorithm::Knn,
        Algorithm::GaussianNb,
        Algorithm::LogisticRegression,
        Algorithm::DecisionStump,
        Algorithm::Mlp,
        Algorithm::LabelPropagation,
        Algorithm::LabelSpreading,
        Algorithm::Ssgmm,
        Algorithm::Tsvm,
        Algorithm::LapSvm,
        Algorithm::CoTraining,
        Algorithm::TriTraining,
        Algorithm::Assemble,
        Algorithm::SemiBoost,
        Algorithm::PseudoLabel,
        Algorithm::PiModel,
        Algorithm::MeanTeacher,
        Algorithm::KnnRegressor,
        Algorithm::MlpRegressor,
        Algorithm::CoReg,
        Algorithm::PiModelReg,
        Algorithm::ConstrainedKmeans,
        Algorithm::ConstrainedSeedKmeans,
    ];

    /// The semi-supervised algorithms (everything except the supervised
    /// baselines).
    pub const SEMI_SUPERVISED: [Algorithm; 16] = [
        Algorithm::LabelPropagation,
        Algorithm::LabelSpreading,
        Algorithm::Ssgmm,
        Algorithm::Tsvm,
        Algorithm::LapSvm,
        Algorithm::CoTraining,
        Algorithm::TriTraining,
        Algorithm::Assemble,
        Algorithm::SemiBoost,
        Algorithm::CoReg,
        Algorithm::ConstrainedKmeans,
        Algorithm::ConstrainedSeedKmeans,
        Algorithm::PseudoLabel,
        Algorithm::PiModel,
        Algorithm::MeanTeacher,
        Algorithm::PiModelReg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Knn => "knn",
            Algorithm::GaussianNb => "gaussian_nb",
            Algorithm::LogisticRegression => "logistic_regression",
            Algorithm::DecisionStump => "decision_stump",
            Algorithm::Mlp => "mlp",
            Algorithm::LabelPropagation => "label_propagation",
            Algorithm::LabelSpreading => "label_spreading",
            Algorithm::Ssgmm => "ssgmm",
            Algorithm::Tsvm => "tsvm",
            Algorithm::LapSvm => "lapsvm",
            Algorithm::CoTraining => "co_training",
            Algorithm::TriTraining => "tri_training",
            Algorithm::Assemble => "assemble",
            Algorithm::SemiBoost => "semiboost",
            Algorithm::PseudoLabel => "pseudo_label",
            Algorithm::PiModel => "pi_model",
            Algorithm::MeanTeacher => "mean_teacher",
            Algorithm::KnnRegressor => "knn_regressor",
            Algorithm::MlpRegressor => "mlp_regressor",
            Algorithm::CoReg => "coreg",
            Algorithm::PiModelReg => "pi_model_reg",
            Algorithm::ConstrainedKmeans => "constrained_kmeans",
            Algorithm::ConstrainedSeedKmeans => "constrained_seed_kmeans",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::UnknownAlgorithm(name.to_string()))
    }

    pub fn task(self) -> TaskKind {
        match self {
            Algorithm::KnnRegressor | Algorithm::MlpRegressor | Algorithm::CoReg | Algorithm::PiModelReg => {
                TaskKind::Regression
            }
            Algorithm::ConstrainedKmeans | Algorithm::ConstrainedSeedKmeans => TaskKind::Clustering,
            _ => TaskKind::Classification,
        }
    }

    /// Graph methods label exactly the points they saw; new rows take the
    /// label distribution of their nearest training point.
    pub fn is_transductive(self) -> bool {
        matches!(self, Algorithm::LabelPropagation | Algorithm::LabelSpreading)
    }
}

#[derive(Clone, Debug, PartialEq)]
struct GraphConfig {
    k: usize,
    mode: GraphMode,
    gamma: Option<f64>,
    alpha: f64,
    prop: PropagationConfig,
}

#[derive(Clone, Debug, PartialEq)]
struct CopConfig {
    k: Option<usize>,
    max_iter: usize,
    restarts: usize,
    use_labels: bool,
    explicit: PairConstraints,
}

#[derive(Clone, Debug, PartialEq)]
enum Config {
    Knn(KnnConfig),
    KnnRegressor(KnnConfig),
    Base(BaseLearnerSpec),
    Graph(GraphConfig),
    Ssgmm(SsgmmConfig),
    Tsvm(TsvmConfig),
    LapSvm(LapSvmConfig),
    CoTraining(BaseLearnerSpec, CoTrainingConfig),
    TriTraining(BaseLearnerSpec, TriTrainingConfig),
    Assemble(BaseLearnerSpec, AssembleConfig),
    SemiBoost(BaseLearnerSpec, SemiBoostConfig),
    CoReg(CoRegConfig),
    Neural(Strategy, TrainConfig),
    Cop(CopConfig),
    SeedKmeans(SeedKmeansConfig),
}

fn fraction(name: &str, v: f64, lo_open: bool) -> Result<f64> {
    let ok = if lo_open { v > 0.0 && v <= 1.0 } else { (0.0..=1.0).contains(&v) };
    if ok {
        Ok(v)
    } else {
        let range = if lo_open { "(0, 1]" } else { "[0, 1]" };
        Err(Error::invalid(name, alloc::format!("must lie in {range}, got {v}")))
    }
}

fn opt_positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    v.map(|g| positive(name, g)).transpose()
}

fn graph_config(r: &mut ParamReader<'_>, spreading: bool) -> Result<GraphConfig> {
    let k = at_least("k", r.usize("k", 7)?, 1)?;
    let mode = GraphMode::parse(&r.string("mode", "rbf")?)?;
    let gamma = opt_positive("gamma", r.real_opt("gamma")?)?;
    let alpha = if spreading {
        let a = r.real("alpha", 0.99)?;
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::invalid("alpha", "must lie in (0, 1)"));
        }
        a
    } else {
        0.0
    };
    let prop = PropagationConfig {
        tol: positive("tol", r.real("tol", 1e-6)?)?,
        max_iter: at_least("max_iter", r.usize("max_iter", 1000)?, 1)?,
    };
    Ok(GraphConfig {
        k,
        mode,
        gamma,
        alpha,
        prop,
    })
}

fn train_config(r: &mut ParamReader<'_>) -> Result<TrainConfig> {
    let d = TrainConfig::default();
    let hidden = r.usize_list_opt("hidden")?.unwrap_or(d.hidden);
    if hidden.contains(&0) {
        return Err(Error::invalid("hidden", "layer sizes must be >= 1"));
    }
    let lr = positive("lr", r.real("lr", d.optimizer.lr())?)?;
    let weight_decay = r.real("weight_decay", 0.0)?;
    let optimizer = match r.string("optimizer", "adam")?.as_str() {
        "adam" => OptimizerSpec::Adam {
            lr,
            beta1: r.real("beta1", 0.9)?,
            beta2: r.real("beta2", 0.999)?,
            eps: r.real("eps", 1e-8)?,
            weight_decay,
        },
        "sgd" => OptimizerSpec::Sgd {
            lr,
            momentum: r.real("momentum", 0.9)?,
            weight_decay,
        },
        other => return Err(Error::invalid("optimizer", alloc::format!("unknown optimizer `{other}`"))),
    };
    optimizer.validate()?;
    let epochs = r.usize("epochs", d.epochs)?;
    let scheduler = match r.string("scheduler", "constant")?.as_str() {
        "constant" => SchedulerSpec::Constant,
        "step" => SchedulerSpec::Step {
            period: r.usize("step_period", 10)?,
            factor: r.real("step_factor", 0.5)?,
        },
        "cosine" => SchedulerSpec::Cosine {
            t_max: r.usize("t_max", epochs.max(1))?,
            lr_min: r.real("lr_min", lr * 1e-2)?,
        },
        other => return Err(Error::invalid("scheduler", alloc::format!("unknown scheduler `{other}`"))),
    };
    scheduler.validate(lr)?;
    Ok(TrainConfig {
        hidden,
        epochs,
        batch_size: at_least("batch_size", r.usize("batch_size", d.batch_size)?, 1)?,
        optimizer,
        scheduler,
        seed: 0,
    })
}

fn strategy(alg: Algorithm, r: &mut ParamReader<'_>) -> Result<Strategy> {
    let ramp = |r: &mut ParamReader<'_>| -> Result<(f64, usize, f64)> {
        Ok((
            r.real("w_max", 1.0)?,
            at_least("ramp_t", r.usize("ramp_t", 10)?, 1)?,
            r.real("noise_sd", 0.1)?,
        ))
    };
    Ok(match alg {
        Algorithm::Mlp | Algorithm::MlpRegressor => Strategy::Supervised,
        Algorithm::PseudoLabel => Strategy::PseudoLabel {
            t1: r.usize("t1", 5)?,
            t2: r.usize("t2", 20)?,
            alpha_f: r.real("alpha_f", 1.0)?,
        },
        Algorithm::PiModel => {
            let (w_max, ramp_t, noise_sd) = ramp(r)?;
            Strategy::PiModel {
                w_max,
                ramp_t,
                noise_sd,
            }
        }
        Algorithm::PiModelReg => {
            let (w_max, ramp_t, noise_sd) = ramp(r)?;
            Strategy::PiModelReg {
                w_max,
                ramp_t,
                noise_sd,
            }
        }
        Algorithm::MeanTeacher => {
            let ema_decay = r.real("ema_decay", 0.99)?;
            let (w_max, ramp_t, noise_sd) = ramp(r)?;
            Strategy::MeanTeacher {
                ema_decay,
                w_max,
                ramp_t,
                noise_sd,
            }
        }
        _ => unreachable!("not a neural algorithm"),
    })
}

fn configure(alg: Algorithm, params: &ParamMap) -> Result<Config> {
    let mut r = ParamReader::new(alg.name(), params);
    let cfg = match alg {
        Algorithm::Knn => Config::Knn(KnnConfig::from_params(&mut r, 3)?),
        Algorithm::KnnRegressor => Config::KnnRegressor(KnnConfig::from_params(&mut r, 3)?),
        Algorithm::GaussianNb => Config::Base(BaseLearnerSpec::new(BaseKind::GaussianNb, params)?),
        Algorithm::LogisticRegression => {
            Config::Base(BaseLearnerSpec::new(BaseKind::LogisticRegression, params)?)
        }
        Algorithm::DecisionStump => Config::Base(BaseLearnerSpec::new(BaseKind::DecisionStump, params)?),
        Algorithm::LabelPropagation => Config::Graph(graph_config(&mut r, false)?),
        Algorithm::LabelSpreading => Config::Graph(graph_config(&mut r, true)?),
        Algorithm::Ssgmm => {
            let d = SsgmmConfig::default();
            Config::Ssgmm(SsgmmConfig {
                max_iter: at_least("max_iter", r.usize("max_iter", d.max_iter)?, 1)?,
                tol: positive("tol", r.real("tol", d.tol)?)?,
                reg: positive("reg", r.real("reg", d.reg)?)?,
            })
        }
        Algorithm::Tsvm => {
            let d = TsvmConfig::default();
            let pos_fraction = r.real_opt("pos_fraction")?.map(|f| fraction("pos_fraction", f, false)).transpose()?;
            Config::Tsvm(TsvmConfig {
                c_l: positive("c_l", r.real("c_l", d.c_l)?)?,
                c_u: positive("c_u", r.real("c_u", d.c_u)?)?,
                pos_fraction,
                solver: LinearSvmConfig {
                    max_sweeps: at_least("max_sweeps", r.usize("max_sweeps", d.solver.max_sweeps)?, 1)?,
                    tol: positive("tol", r.real("tol", d.solver.tol)?)?,
                },
            })
        }
        Algorithm::LapSvm => {
            let d = LapSvmConfig::default();
            let gamma_a = positive("gamma_a", r.real("gamma_a", d.gamma_a)?)?;
            let gamma_i = r.real("gamma_i", d.gamma_i)?;
            if gamma_i < 0.0 {
                return Err(Error::invalid("gamma_i", "must be >= 0"));
            }
            Config::LapSvm(LapSvmConfig {
                gamma_a,
                gamma_i,
                gamma: opt_positive("gamma", r.real_opt("gamma")?)?,
                k: at_least("k", r.usize("k", d.k)?, 1)?,
                iters: r.usize("iters", d.iters)?,
            })
        }
        Algorithm::CoTraining => {
            let base = BaseLearnerSpec::from_reader(&mut r, BaseKind::GaussianNb)?;
            let d = CoTrainingConfig::default();
            let views = match (r.usize_list_opt("view1")?, r.usize_list_opt("view2")?) {
                (None, None) => None,
                (Some(first), Some(second)) => Some(ViewSplit { first, second }),
                _ => return Err(Error::invalid("view1", "give both view1 and view2, or neither")),
            };
            Config::CoTraining(
                base,
                CoTrainingConfig {
                    p: r.usize("p", d.p)?,
                    n: r.usize("n", d.n)?,
                    pool: at_least("pool", r.usize("pool", d.pool)?, 1)?,
                    rounds: r.usize("rounds", d.rounds)?,
                    seed: 0,
                    views,
                },
            )
        }
        Algorithm::TriTraining => {
            let base = BaseLearnerSpec::from_reader(&mut r, BaseKind::GaussianNb)?;
            let d = TriTrainingConfig::default();
            Config::TriTraining(
                base,
                TriTrainingConfig {
                    seed: 0,
                    max_rounds: r.usize("max_rounds", d.max_rounds)?,
                },
            )
        }
        Algorithm::Assemble => {
            let base = BaseLearnerSpec::from_reader(&mut r, BaseKind::DecisionStump)?;
            let d = AssembleConfig::default();
            Config::Assemble(
                base,
                AssembleConfig {
                    rounds: r.usize("rounds", d.rounds)?,
                    beta: fraction("beta", r.real("beta", d.beta)?, true)?,
                },
            )
        }
        Algorithm::SemiBoost => {
            let base = BaseLearnerSpec::from_reader(&mut r, BaseKind::DecisionStump)?;
            let d = SemiBoostConfig::default();
            Config::SemiBoost(
                base,
                SemiBoostConfig {
                    rounds: r.usize("rounds", d.rounds)?,
                    c: positive("c", r.real("c", d.c)?)?,
                    sample_fraction: fraction("sample_fraction", r.real("sample_fraction", d.sample_fraction)?, true)?,
                    gamma: opt_positive("gamma", r.real_opt("gamma")?)?,
                },
            )
        }
        Algorithm::CoReg => {
            let d = CoRegConfig::default();
            let p1 = r.real("p1", d.p1)?;
            let p2 = r.real("p2", d.p2)?;
            if p1 < 1.0 || p2 < 1.0 {
                return Err(Error::invalid("p1", "Minkowski orders must be >= 1"));
            }
            Config::CoReg(CoRegConfig {
                k1: at_least("k1", r.usize("k1", d.k1)?, 1)?,
                k2: at_least("k2", r.usize("k2", d.k2)?, 1)?,
                p1,
                p2,
                rounds: r.usize("rounds", d.rounds)?,
                pool: at_least("pool", r.usize("pool", d.pool)?, 1)?,
                seed: 0,
            })
        }
        Algorithm::Mlp
        | Algorithm::MlpRegressor
        | Algorithm::PseudoLabel
        | Algorithm::PiModel
        | Algorithm::MeanTeacher
        | Algorithm::PiModelReg => {
            let s = strategy(alg, &mut r)?;
            Config::Neural(s, train_config(&mut r)?)
        }
        Algorithm::ConstrainedKmeans => {
            let d = CopKmeansConfig::new(1);
            let k = r.usize_opt("k")?.map(|k| at_least("k", k, 1)).transpose()?;
            Config::Cop(CopConfig {
                k,
                max_iter: at_least("max_iter", r.usize("max_iter", d.max_iter)?, 1)?,
                restarts: at_least("restarts", r.usize("restarts", d.restarts)?, 1)?,
                use_labels: r.bool("use_labels", true)?,
                explicit: PairConstraints {
                    must_link: r.pairs_opt("must_link")?.unwrap_or_default(),
                    cannot_link: r.pairs_opt("cannot_link")?.unwrap_or_default(),
                },
            })
        }
        Algorithm::ConstrainedSeedKmeans => {
            let d = SeedKmeansConfig::default();
            Config::SeedKmeans(SeedKmeansConfig {
                clamp: r.bool("clamp", d.clamp)?,
                max_iter: at_least("max_iter", r.usize("max_iter", d.max_iter)?, 1)?,
            })
        }
    };
    // Base learners built from the whole map have already checked every key.
    if !matches!(cfg, Config::Base(_)) {
        r.finish()?;
    }
    Ok(cfg)
}

/// An algorithm name with validated parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorSpec {
    algorithm: Algorithm,
    params: ParamMap,
    config: Config,
}

impl EstimatorSpec {
    pub fn new(name: &str, params: ParamMap) -> Result<Self> {
        let algorithm = Algorithm::parse(name)?;
        let config = configure(algorithm, &params)?;
        Ok(Self {
            algorithm,
            params,
            config,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn name(&self) -> &'static str {
        self.algorithm.name()
    }

    pub fn params(&self) -> &ParamMap {
        &self.params
    }

    pub fn task(&self) -> TaskKind {
        self.algorithm.task()
    }

    /// The same algorithm with `overrides` applied on top of its parameters.
    pub fn with_params(&self, overrides: &ParamMap) -> Result<Self> {
        Self::new(self.name(), self.params.merged(overrides))
    }
}

/// Convergence information reported by a fit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Iterations, rounds, sweeps or epochs, depending on the algorithm.
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    /// Final objective (log-likelihood, k-means cost, training loss).
    pub objective: Option<f64>,
    /// Objective after every iteration.
    pub trace: Vec<f64>,
    pub warnings: Vec<String>,
}

/// The fitted state of one algorithm.
#[derive(Clone, Debug, PartialEq)]
pub enum FittedAlgorithm {
    Knn(KnnClassifier),
    KnnRegressor(KnnRegressor),
    Base(BaseClassifier),
    /// Class distribution of every training point (labeled rows first).
    Transductive { x_train: Matrix, distribution: Matrix },
    Gmm(GmmState),
    Linear(LinearSvmModel),
    Kernel(KernelModel),
    CoTraining(CoTrainingModel),
    TriTraining(TriTrainingModel),
    Boost(BoostEnsemble),
    CoReg(CoRegModel),
    Neural(NeuralModel),
    Clustering(ClusteringResult),
}

impl FittedAlgorithm {
    fn output(&self, x: &Matrix) -> Result<Output> {
        Ok(match self {
            FittedAlgorithm::Knn(m) => Output::from_scores(m.predict_proba(x)),
            FittedAlgorithm::KnnRegressor(m) => Output::Values(m.predict(x)),
            FittedAlgorithm::Base(BaseClassifier::Stump(s)) => Output::Classes {
                labels: s.predict(x),
                scores: Some(s.predict_proba(x)),
            },
            FittedAlgorithm::Base(m) => Output::from_scores(m.predict_proba(x)),
            FittedAlgorithm::Transductive { x_train, distribution } => {
                let mut scores = Matrix::zeros(x.rows(), distribution.cols());
                for (i, q) in x.row_iter().enumerate() {
                    let j = nearest_row(x_train, q);
                    scores.row_mut(i).copy_from_slice(distribution.row(j));
                }
                Output::from_scores(scores)
            }
            FittedAlgorithm::Gmm(g) => Output::from_scores(g.predict_proba(x)?),
            FittedAlgorithm::Linear(m) => Output::hard(
                m.decision_function(x).into_iter().map(|f| usize::from(f > 0.0)).collect(),
            ),
            FittedAlgorithm::Kernel(m) => Output::hard(
                m.decision_function(x).into_iter().map(|f| usize::from(f > 0.0)).collect(),
            ),
            FittedAlgorithm::CoTraining(m) => Output::from_scores(m.predict_proba(x)),
            FittedAlgorithm::TriTraining(m) => Output::from_scores(m.predict_votes(x)),
            FittedAlgorithm::Boost(m) => Output::from_scores(m.predict_proba(x)),
            FittedAlgorithm::CoReg(m) => Output::Values(m.predict(x)),
            FittedAlgorithm::Neural(m) => {
                let raw = m.predict_raw(x)?;
                if m.regression {
                    Output::Values(raw.col_values(0))
                } else {
                    Output::from_scores(raw)
                }
            }
            FittedAlgorithm::Clustering(c) => Output::hard(c.predict(x)?),
        })
    }
}

/// Nearest row by Euclidean distance, lower index on ties.
fn nearest_row(train: &Matrix, q: &[f64]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (j, r) in train.row_iter().enumerate() {
        let d = math::squared_distance(r, q);
        if d < best.1 {
            best = (j, d);
        }
    }
    best.0
}

/// An immutable fitted estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedModel {
    algorithm: Algorithm,
    task: TaskKind,
    n_features: usize,
    /// Original class id per dense index (cluster ids for clustering).
    classes: Vec<i64>,
    state: FittedAlgorithm,
    pub diagnostics: Diagnostics,
}

impl FittedModel {
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn classes(&self) -> &[i64] {
        &self.classes
    }

    pub fn state(&self) -> &FittedAlgorithm {
        &self.state
    }

    pub fn predict(&self, x: &Matrix) -> Result<Prediction> {
        let empty = || match self.task {
            TaskKind::Regression => Labels::Real(Vec::new()),
            _ => Labels::Class(Vec::new()),
        };
        if x.rows() == 0 {
            return Ok(Prediction {
                labels: empty(),
                scores: None,
                classes: self.classes.clone(),
            });
        }
        if x.cols() != self.n_features {
            return Err(Error::dims("feature-dimension", self.n_features, x.cols()));
        }
        if let Some((row, col)) = x.first_non_finite() {
            return Err(Error::NonFinite {
                what: "X".to_string(),
                row,
                col,
            });
        }
        Ok(match self.state.output(x)? {
            Output::Values(v) => Prediction {
                labels: Labels::Real(v),
                scores: None,
                classes: Vec::new(),
            },
            Output::Classes { labels, scores } => Prediction {
                labels: Labels::Class(labels.into_iter().map(|c| self.classes[c]).collect()),
                scores,
                classes: self.classes.clone(),
            },
        })
    }
}

fn seeds(t: &TrainingSet) -> Result<Vec<Option<usize>>> {
    let mut s: Vec<Option<usize>> = t.class_labels()?.iter().map(|&c| Some(c)).collect();
    s.resize(t.n_labeled() + t.n_unlabeled(), None);
    Ok(s)
}

/// Must-link chains inside each labeled class and cannot-links between the
/// first member of every pair of classes.
fn label_constraints(labels: &[usize], n_classes: usize) -> PairConstraints {
    let mut first: Vec<Option<usize>> = alloc::vec![None; n_classes];
    let mut last: Vec<Option<usize>> = alloc::vec![None; n_classes];
    let mut c = PairConstraints::default();
    for (i, &y) in labels.iter().enumerate() {
        if let Some(prev) = last[y] {
            c.must_link.push((prev, i));
        }
        last[y] = Some(i);
        first[y].get_or_insert(i);
    }
    let reps: Vec<usize> = first.into_iter().flatten().collect();
    for (a, &i) in reps.iter().enumerate() {
        for &j in &reps[a + 1..] {
            c.cannot_link.push((i, j));
        }
    }
    c
}

fn fit_graph(t: &TrainingSet, g: &GraphConfig, algorithm: Algorithm) -> Result<(FittedAlgorithm, Diagnostics)> {
    let all = t.all_x();
    let n = all.rows();
    if g.k >= n {
        return Err(Error::invalid("k", alloc::format!("need k < n = {n}, got {}", g.k)));
    }
    let gamma = g.gamma.unwrap_or_else(|| default_gamma(&all));
    let graph = build_knn_graph(&all, g.k, g.mode, gamma)?;
    let seeds = seeds(t)?;
    let res = if algorithm == Algorithm::LabelSpreading {
        label_spreading(&graph, &seeds, t.n_classes(), g.alpha, g.prop)?
    } else {
        label_propagation(&graph, &seeds, t.n_classes(), g.prop, |_, _| {})?
    };
    let mut diag = Diagnostics {
        iterations: Some(res.iterations),
        converged: Some(res.converged),
        trace: res.deltas.clone(),
        ..Diagnostics::default()
    };
    if !res.converged {
        diag.warnings
            .push(alloc::format!("no convergence after {} iterations", res.iterations));
    }
    Ok((
        FittedAlgorithm::Transductive {
            x_train: all,
            distribution: res.distribution,
        },
        diag,
    ))
}

fn fit_validated(spec: &EstimatorSpec, t: &TrainingSet, seed: u64) -> Result<(FittedAlgorithm, Diagnostics)> {
    let mut diag = Diagnostics::default();
    let state = match &spec.config {
        Config::Knn(cfg) => FittedAlgorithm::Knn(KnnClassifier::fit(&t.x, t.class_labels()?, t.n_classes(), *cfg)?),
        Config::KnnRegressor(cfg) => FittedAlgorithm::KnnRegressor(KnnRegressor::fit(&t.x, t.real_targets()?, *cfg)?),
        Config::Base(b) => FittedAlgorithm::Base(b.fit(&t.x, t.class_labels()?, t.n_classes(), None)?),
        Config::Graph(g) => return fit_graph(t, g, spec.algorithm),
        Config::Ssgmm(cfg) => {
            let g = ssgmm_fit(t, *cfg)?;
            diag.iterations = Some(g.iterations);
            diag.converged = Some(g.converged);
            diag.objective = g.log_likelihood.last().copied();
            diag.trace = g.log_likelihood.clone();
            FittedAlgorithm::Gmm(g)
        }
        Config::Tsvm(cfg) => {
            let m = tsvm_fit(t, *cfg)?;
            diag.iterations = Some(m.swaps.len());
            diag.converged = Some(m.converged);
            diag.trace = m.swaps.iter().map(|s| s.objective_after).collect();
            FittedAlgorithm::Linear(m.svm)
        }
        Config::LapSvm(cfg) => {
            let m = lapsvm_fit(t, *cfg)?;
            diag.iterations = Some(m.objective_trace.len());
            diag.converged = Some(m.converged);
            diag.objective = m.objective_trace.last().copied();
            diag.trace = m.objective_trace.clone();
            FittedAlgorithm::Kernel(m)
        }
        Config::CoTraining(base, cfg) => {
            let cfg = CoTrainingConfig { seed, ..cfg.clone() };
            let m = co_training_fit(t, base, &cfg)?;
            diag.iterations = Some(m.rounds_run);
            FittedAlgorithm::CoTraining(m)
        }
        Config::TriTraining(base, cfg) => {
            let m = tri_training_fit(t, base, TriTrainingConfig { seed, ..*cfg })?;
            diag.iterations = Some(m.rounds);
            diag.converged = Some(m.converged);
            FittedAlgorithm::TriTraining(m)
        }
        Config::Assemble(base, cfg) => {
            let m = assemble_fit(t, base, *cfg)?;
            diag.iterations = Some(m.members.len());
            FittedAlgorithm::Boost(m)
        }
        Config::SemiBoost(base, cfg) => {
            let m = semiboost_fit(t, base, *cfg)?;
            diag.iterations = Some(m.members.len());
            FittedAlgorithm::Boost(m)
        }
        Config::CoReg(cfg) => {
            let m = coreg_fit(t, CoRegConfig { seed, ..*cfg })?;
            diag.iterations = Some(m.rounds_run);
            FittedAlgorithm::CoReg(m)
        }
        Config::Neural(strategy, cfg) => {
            let cfg = TrainConfig { seed, ..cfg.clone() };
            let m = trainer_fit(*strategy, t, &cfg)?;
            diag.iterations = Some(m.loss_trace.len());
            diag.objective = m.loss_trace.last().copied();
            diag.trace = m.loss_trace.clone();
            FittedAlgorithm::Neural(m)
        }
        Config::Cop(c) => {
            let all = t.all_x();
            let n = all.rows();
            let labels = t.class_labels()?;
            let mut cons = if c.use_labels {
                label_constraints(labels, t.n_classes())
            } else {
                PairConstraints::default()
            };
            for &(i, j) in c.explicit.must_link.iter().chain(&c.explicit.cannot_link) {
                if i >= n || j >= n {
                    return Err(Error::InvalidData(alloc::format!(
                        "constraint ({i}, {j}) refers past the {n} rows"
                    )));
                }
            }
            cons.must_link.extend_from_slice(&c.explicit.must_link);
            cons.cannot_link.extend_from_slice(&c.explicit.cannot_link);
            let k = c.k.unwrap_or(t.n_classes());
            let cfg = CopKmeansConfig {
                k,
                max_iter: c.max_iter,
                restarts: c.restarts,
                seed,
            };
            let res = constrained_kmeans_fit(&all, &cons, cfg)?;
            clustering_diag(&res, &mut diag);
            FittedAlgorithm::Clustering(res)
        }
        Config::SeedKmeans(cfg) => {
            let res = constrained_seed_kmeans_fit(t, *cfg)?;
            clustering_diag(&res, &mut diag);
            FittedAlgorithm::Clustering(res)
        }
    };
    Ok((state, diag))
}

fn clustering_diag(res: &ClusteringResult, diag: &mut Diagnostics) {
    diag.iterations = Some(res.iterations);
    diag.converged = Some(res.converged);
    diag.objective = Some(res.objective);
    diag.trace = res.objective_trace.clone();
}

/// Validates `d` for the algorithm's task and fits it. Identical inputs and
/// seed give identical models.
pub fn fit(spec: &EstimatorSpec, d: &SslDataset, seed: u64) -> Result<FittedModel> {
    let t = validate(d, spec.task())?;
    fit_training_set(spec, &t, seed)
}

/// [`fit`] for an already validated dataset.
pub fn fit_training_set(spec: &EstimatorSpec, t: &TrainingSet, seed: u64) -> Result<FittedModel> {
    if t.kind != spec.task() {
        return Err(Error::Unsupported(alloc::format!(
            "{} is a {} algorithm, the data was validated for {}",
            spec.name(),
            spec.task().as_str(),
            t.kind.as_str()
        )));
    }
    let (state, diagnostics) = fit_validated(spec, t, seed)?;
    let classes = match (&state, spec.task()) {
        (FittedAlgorithm::Clustering(c), _) => (0..c.centroids.rows() as i64).collect(),
        (_, TaskKind::Regression) => Vec::new(),
        _ => t.classes.clone(),
    };
    Ok(FittedModel {
        algorithm: spec.algorithm,
        task: spec.task(),
        n_features: t.n_features(),
        classes,
        state,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn every_name_resolves() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::parse(a.name()).unwrap(), a);
            EstimatorSpec::new(a.name(), ParamMap::new()).unwrap();
        }
        assert_eq!(
            EstimatorSpec::new("svm_plus", ParamMap::new()).unwrap_err(),
            Error::UnknownAlgorithm("svm_plus".into())
        );
    }

    #[test]
    fn invalid_and_unknown_parameters() {
        let e = EstimatorSpec::new("knn", ParamMap::new().with("k", 0)).unwrap_err();
        assert!(matches!(e, Error::InvalidParameter { .. }));
        let e = EstimatorSpec::new("label_spreading", ParamMap::new().with("alpah", 0.5)).unwrap_err();
        assert!(matches!(e, Error::UnknownParameter { .. }));
        let e = EstimatorSpec::new("gaussian_nb", ParamMap::new().with("k", 1)).unwrap_err();
        assert!(matches!(e, Error::UnknownParameter { .. }));
    }

    #[test]
    fn one_nearest_neighbor_maps_class_ids_back() {
        let d = SslDataset::supervised(Matrix::column(&[0.0, 10.0]), Labels::Class(vec![3, 8]));
        let m = fit(&EstimatorSpec::new("knn", ParamMap::new().with("k", 1)).unwrap(), &d, 0).unwrap();
        let p = m.predict(&Matrix::column(&[1.0, 9.0])).unwrap();
        assert_eq!(p.labels, Labels::Class(vec![3, 8]));
        assert_eq!(p.classes, vec![3, 8]);
        assert!(m.predict(&Matrix::zeros(0, 1)).unwrap().is_empty());
        assert!(m.predict(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn k_beyond_training_rows() {
        let d = SslDataset::supervised(Matrix::column(&[0.0, 1.0]), Labels::Class(vec![0, 1]));
        let spec = EstimatorSpec::new("knn", ParamMap::new().with("k", 3)).unwrap();
        assert!(fit(&spec, &d, 0).is_err());
    }

    #[test]
    fn single_class_is_degenerate_for_ssgmm() {
        let d = SslDataset::new(
            Matrix::column(&[0.0, 1.0]),
            Labels::Class(vec![2, 2]),
            Matrix::column(&[5.0]),
        );
        let e = fit(&EstimatorSpec::new("ssgmm", ParamMap::new()).unwrap(), &d, 0).unwrap_err();
        assert!(matches!(e, Error::DegenerateLabels(_)));
    }

    #[test]
    fn label_constraints_chain_classes() {
        let c = label_constraints(&[0, 1, 0, 1, 2], 3);
        assert_eq!(c.must_link, vec![(0, 2), (1, 3)]);
        assert_eq!(c.cannot_link, vec![(0, 1), (0, 4), (1, 4)]);
    }

    #[test]
    fn conflicting_explicit_constraints_are_infeasible() {
        let x = Matrix::column(&[0.0, 0.1, 5.0, 5.1]);
        let d = SslDataset::new(x.select_rows(&[0]), Labels::Class(vec![0]), x.select_rows(&[1, 2, 3]));
        let params = ParamMap::new()
            .with("k", 2)
            .with("must_link", vec![vec![0, 1]])
            .with("cannot_link", vec![vec![1, 0]]);
        let spec = EstimatorSpec::new("constrained_kmeans", params).unwrap();
        let e = fit(&spec, &d, 0).unwrap_err();
        assert_eq!(e.kind(), crate::error::ErrorKind::Algorithm);
    }
}
