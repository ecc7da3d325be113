use alloc::vec::Vec;

use super::mlp::{add_noise, consistency_mse, mse, softmax_cross_entropy, softmax_rows, Mlp};
use super::optim::{Optimizer, OptimizerSpec, SchedulerSpec};
use crate::dataset::{TrainingSet, Targets};
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    /// Cross-entropy (classes) or MSE (real targets) on labeled data only.
    Supervised,
    PseudoLabel { t1: usize, t2: usize, alpha_f: f64 },
    PiModel { w_max: f64, ramp_t: usize, noise_sd: f64 },
    MeanTeacher { ema_decay: f64, w_max: f64, ramp_t: usize, noise_sd: f64 },
    PiModelReg { w_max: f64, ramp_t: usize, noise_sd: f64 },
}

impl Strategy {
    pub fn pseudo_label() -> Self {
        Strategy::PseudoLabel {
            t1: 5,
            t2: 20,
            alpha_f: 1.0,
        }
    }

    pub fn pi_model() -> Self {
        Strategy::PiModel {
            w_max: 1.0,
            ramp_t: 10,
            noise_sd: 0.1,
        }
    }

    pub fn mean_teacher() -> Self {
        Strategy::MeanTeacher {
            ema_decay: 0.99,
            w_max: 1.0,
            ramp_t: 10,
            noise_sd: 0.1,
        }
    }

    pub fn pi_model_reg() -> Self {
        Strategy::PiModelReg {
            w_max: 1.0,
            ramp_t: 10,
            noise_sd: 0.1,
        }
    }

    pub fn is_regression(&self) -> bool {
        matches!(self, Strategy::PiModelReg { .. })
    }

    fn validate(&self) -> Result<()> {
        let check_ramp = |ramp_t: usize, w_max: f64, noise_sd: f64| {
            if ramp_t == 0 {
                return Err(Error::invalid("ramp_t", "must be >= 1"));
            }
            if !(w_max >= 0.0) {
                return Err(Error::invalid("w_max", "must be >= 0"));
            }
            if !(noise_sd >= 0.0) {
                return Err(Error::invalid("noise_sd", "must be >= 0"));
            }
            Ok(())
        };
        match *self {
            Strategy::Supervised => Ok(()),
            Strategy::PseudoLabel { t1, t2, alpha_f } => {
                if t2 <= t1 {
                    return Err(Error::invalid("t2", "must exceed t1"));
                }
                if !(alpha_f >= 0.0) {
                    return Err(Error::invalid("alpha_f", "must be >= 0"));
                }
                Ok(())
            }
            Strategy::PiModel {
                w_max,
                ramp_t,
                noise_sd,
            }
            | Strategy::PiModelReg {
                w_max,
                ramp_t,
                noise_sd,
            } => check_ramp(ramp_t, w_max, noise_sd),
            Strategy::MeanTeacher {
                ema_decay,
                w_max,
                ramp_t,
                noise_sd,
            } => {
                if !(0.0..1.0).contains(&ema_decay) {
                    return Err(Error::invalid("ema_decay", "must lie in [0, 1)"));
                }
                check_ramp(ramp_t, w_max, noise_sd)
            }
        }
    }

    /// Weight of the unlabeled term at `epoch`.
    pub fn unsupervised_weight(&self, epoch: usize) -> f64 {
        match *self {
            Strategy::Supervised => 0.0,
            Strategy::PseudoLabel { t1, t2, alpha_f } => {
                let t = (epoch as f64 - t1 as f64) / (t2 - t1) as f64;
                alpha_f * t.clamp(0.0, 1.0)
            }
            Strategy::PiModel { w_max, ramp_t, .. }
            | Strategy::MeanTeacher { w_max, ramp_t, .. }
            | Strategy::PiModelReg { w_max, ramp_t, .. } => ramp_weight(epoch, ramp_t, w_max),
        }
    }
}

/// `w_max·exp(−5(1 − min(t, T)/T)²)`.
pub fn ramp_weight(t: usize, ramp_t: usize, w_max: f64) -> f64 {
    let x = 1.0 - t.min(ramp_t) as f64 / ramp_t as f64;
    w_max * math::exp(-5.0 * x * x)
}

/// EMA coefficient after optimizer step `step` (1-based).
pub fn ema_momentum(decay: f64, step: u64) -> f64 {
    decay.min(1.0 - 1.0 / (step as f64 + 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerSpec,
    pub scheduler: SchedulerSpec,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: alloc::vec![32],
            epochs: 100,
            batch_size: 32,
            optimizer: OptimizerSpec::adam(0.01),
            scheduler: SchedulerSpec::Constant,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeuralModel {
    /// The network used for prediction (the teacher for mean teacher).
    pub net: Mlp,
    /// The trained student network.
    pub student: Mlp,
    pub regression: bool,
    /// Mean total loss per epoch.
    pub loss_trace: Vec<f64>,
    pub steps: u64,
}

impl NeuralModel {
    /// Class probabilities, or a one-column matrix of predicted values.
    pub fn predict_raw(&self, x: &Matrix) -> Result<Matrix> {
        let out = self.net.output(x)?;
        Ok(if self.regression { out } else { softmax_rows(&out) })
    }
}

/// Observer called after every optimizer step with (step, student, teacher).
pub type StepHook<'a> = &'a mut dyn FnMut(u64, &Mlp, &Mlp);

fn batches(order: &[usize], bs: usize, steps: usize) -> Vec<Vec<usize>> {
    if order.is_empty() {
        return alloc::vec![Vec::new(); steps];
    }
    let per = order.len().div_ceil(bs);
    (0..steps)
        .map(|s| {
            let b = s % per;
            order[b * bs..((b + 1) * bs).min(order.len())].to_vec()
        })
        .collect()
}

pub fn trainer_fit(strategy: Strategy, d: &TrainingSet, cfg: &TrainConfig) -> Result<NeuralModel> {
    trainer_fit_observed(strategy, d, cfg, &mut |_, _, _| {})
}

/// One loop for every strategy. Each step takes one labeled batch and one
/// unlabeled batch, cycling the shorter stream; initialization, shuffling
/// and input noise draw from separate seeded streams.
pub fn trainer_fit_observed(
    strategy: Strategy,
    d: &TrainingSet,
    cfg: &TrainConfig,
    hook: StepHook<'_>,
) -> Result<NeuralModel> {
    strategy.validate()?;
    cfg.optimizer.validate()?;
    cfg.scheduler.validate(cfg.optimizer.lr())?;
    if cfg.batch_size == 0 {
        return Err(Error::invalid("batch_size", "must be >= 1"));
    }
    let (regression, out_dim, y_class, y_real) = match &d.targets {
        Targets::Class { labels, n_classes } => {
            if strategy.is_regression() {
                return Err(Error::Unsupported("pi_model_reg needs real-valued targets".into()));
            }
            (false, *n_classes, labels.clone(), Matrix::zeros(0, 1))
        }
        Targets::Real(v) => {
            if !matches!(strategy, Strategy::Supervised | Strategy::PiModelReg { .. }) {
                return Err(Error::Unsupported(
                    "classification strategies need class targets".into(),
                ));
            }
            (true, 1, Vec::new(), Matrix::column(v))
        }
    };

    let mut sizes = alloc::vec![d.n_features()];
    sizes.extend_from_slice(&cfg.hidden);
    sizes.push(out_dim);
    let mut master = Rng::new(cfg.seed);
    let mut init_rng = master.fork();
    let mut shuffle_l = master.fork();
    let mut shuffle_u = master.fork();
    let mut noise = master.fork();

    let mut student = Mlp::new(&sizes, &mut init_rng)?;
    let mut teacher = student.clone();
    let mut opt = Optimizer::new(cfg.optimizer, student.params().len());
    let l = d.n_labeled();
    let u = d.n_unlabeled();
    let bs = cfg.batch_size;
    let steps_per_epoch = l.div_ceil(bs).max(u.div_ceil(bs));
    let mut loss_trace = Vec::with_capacity(cfg.epochs);
    let mut grads = alloc::vec![0.0; student.params().len()];

    for epoch in 0..cfg.epochs {
        let lr = cfg.scheduler.lr(cfg.optimizer.lr(), epoch);
        let w = strategy.unsupervised_weight(epoch);
        let lab_batches = batches(&shuffle_l.permutation(l), bs, steps_per_epoch);
        let unl_batches = batches(&shuffle_u.permutation(u), bs, steps_per_epoch);
        let mut epoch_loss = 0.0;

        for (b, (lb, ub)) in lab_batches.iter().zip(&unl_batches).enumerate() {
            grads.iter_mut().for_each(|g| *g = 0.0);
            let xl = d.x.select_rows(lb);
            let f = student.forward(&xl)?;
            let (mut loss, d_out) = if regression {
                mse(f.output(), &y_real.select_rows(lb))
            } else {
                let t: Vec<usize> = lb.iter().map(|&i| y_class[i]).collect();
                softmax_cross_entropy(f.output(), &t)
            };
            student.backward_into(&f, &d_out, &mut grads);

            if w > 0.0 {
                let xu = d.unlabeled_x.select_rows(ub);
                match strategy {
                    Strategy::Supervised => {}
                    Strategy::PseudoLabel { .. } => {
                        if !ub.is_empty() {
                            let fu = student.forward(&xu)?;
                            let targets: Vec<usize> = fu.output().row_iter().map(math::argmax).collect();
                            let (lu, mut du) = softmax_cross_entropy(fu.output(), &targets);
                            du.as_mut_slice().iter_mut().for_each(|g| *g *= w);
                            student.backward_into(&fu, &du, &mut grads);
                            loss += w * lu;
                        }
                    }
                    Strategy::PiModel { noise_sd, .. } | Strategy::PiModelReg { noise_sd, .. } => {
                        let all = xl.vstack(&xu)?;
                        let fa = student.forward(&add_noise(&all, noise_sd, &mut noise))?;
                        let fb = student.forward(&add_noise(&all, noise_sd, &mut noise))?;
                        let (lc, mut ga, mut gb) = if regression {
                            let (lc, g) = mse(fa.output(), fb.output());
                            let mut neg = g.clone();
                            neg.as_mut_slice().iter_mut().for_each(|v| *v = -*v);
                            (lc, g, neg)
                        } else {
                            consistency_mse(fa.output(), fb.output())
                        };
                        ga.as_mut_slice().iter_mut().for_each(|g| *g *= w);
                        gb.as_mut_slice().iter_mut().for_each(|g| *g *= w);
                        student.backward_into(&fa, &ga, &mut grads);
                        student.backward_into(&fb, &gb, &mut grads);
                        loss += w * lc;
                    }
                    Strategy::MeanTeacher { noise_sd, .. } => {
                        let all = xl.vstack(&xu)?;
                        let fs = student.forward(&add_noise(&all, noise_sd, &mut noise))?;
                        let ft = teacher.output(&add_noise(&all, noise_sd, &mut noise))?;
                        let (lc, mut gs, _) = consistency_mse(fs.output(), &ft);
                        gs.as_mut_slice().iter_mut().for_each(|g| *g *= w);
                        student.backward_into(&fs, &gs, &mut grads);
                        loss += w * lc;
                    }
                }
            }

            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: b });
            }
            epoch_loss += loss;
            opt.step(student.params_mut(), &grads, lr);
            if let Strategy::MeanTeacher { ema_decay, .. } = strategy {
                let m = ema_momentum(ema_decay, opt.steps());
                for (t, s) in teacher.params_mut().iter_mut().zip(student.params()) {
                    *t = m * *t + (1.0 - m) * s;
                }
            } else {
                teacher.params_mut().copy_from_slice(student.params());
            }
            hook(opt.steps(), &student, &teacher);
        }
        loss_trace.push(epoch_loss / steps_per_epoch.max(1) as f64);
    }

    let net = match strategy {
        Strategy::MeanTeacher { .. } => teacher,
        _ => student.clone(),
    };
    Ok(NeuralModel {
        net,
        student,
        regression,
        loss_trace,
        steps: opt.steps(),
    })
}
