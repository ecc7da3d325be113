use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OptimizerSpec {
    Sgd {
        lr: f64,
        momentum: f64,
        weight_decay: f64,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        weight_decay: f64,
    },
}

impl OptimizerSpec {
    pub fn adam(lr: f64) -> Self {
        OptimizerSpec::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.0,
        }
    }

    pub fn sgd(lr: f64, momentum: f64) -> Self {
        OptimizerSpec::Sgd {
            lr,
            momentum,
            weight_decay: 0.0,
        }
    }

    pub fn lr(&self) -> f64 {
        match *self {
            OptimizerSpec::Sgd { lr, .. } | OptimizerSpec::Adam { lr, .. } => lr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lr, wd) = match *self {
            OptimizerSpec::Sgd {
                lr,
                momentum,
                weight_decay,
            } => {
                if !(0.0..1.0).contains(&momentum) {
                    return Err(Error::invalid("momentum", "must lie in [0, 1)"));
                }
                (lr, weight_decay)
            }
            OptimizerSpec::Adam {
                lr,
                beta1,
                beta2,
                eps,
                weight_decay,
            } => {
                if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || !(eps > 0.0) {
                    return Err(Error::invalid("beta1", "Adam needs betas in [0, 1) and eps > 0"));
                }
                (lr, weight_decay)
            }
        };
        if !(lr > 0.0) || !lr.is_finite() {
            return Err(Error::invalid("lr", "must be > 0"));
        }
        if !(wd >= 0.0) {
            return Err(Error::invalid("weight_decay", "must be >= 0"));
        }
        Ok(())
    }
}

/// Moment buffers and step counter for one parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Optimizer {
    spec: OptimizerSpec,
    m: Vec<f64>,
    v: Vec<f64>,
    steps: u64,
}

impl Optimizer {
    pub fn new(spec: OptimizerSpec, n_params: usize) -> Self {
        Self {
            spec,
            m: alloc::vec![0.0; n_params],
            v: alloc::vec![0.0; n_params],
            steps: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// One update with learning rate `lr` (the scheduler's value).
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        self.steps += 1;
        match self.spec {
            OptimizerSpec::Sgd {
                momentum,
                weight_decay,
                ..
            } => {
                for ((p, g), v) in params.iter_mut().zip(grads).zip(&mut self.v) {
                    *v = momentum * *v + g + weight_decay * *p;
                    *p -= lr * *v;
                }
            }
            OptimizerSpec::Adam {
                beta1,
                beta2,
                eps,
                weight_decay,
                ..
            } => {
                let t = self.steps as f64;
                let c1 = 1.0 - math::pow(beta1, t);
                let c2 = 1.0 - math::pow(beta2, t);
                for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
                    let g = g + weight_decay * *p;
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    *p -= lr * (*m / c1) / (math::sqrt(*v / c2) + eps);
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchedulerSpec {
    Constant,
    /// Multiply by `factor` every `period` epochs.
    Step { period: usize, factor: f64 },
    /// Cosine decay from the base rate to `lr_min` over `t_max` epochs.
    Cosine { t_max: usize, lr_min: f64 },
}

impl SchedulerSpec {
    pub fn validate(&self, base: f64) -> Result<()> {
        match *self {
            SchedulerSpec::Constant => Ok(()),
            SchedulerSpec::Step { period, factor } => {
                if period == 0 || !(factor > 0.0 && factor <= 1.0) {
                    Err(Error::invalid("scheduler", "step needs period >= 1 and factor in (0, 1]"))
                } else {
                    Ok(())
                }
            }
            SchedulerSpec::Cosine { t_max, lr_min } => {
                if t_max == 0 || !(lr_min > 0.0) || lr_min > base {
                    Err(Error::invalid("scheduler", "cosine needs t_max >= 1 and 0 < lr_min <= lr"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Learning rate for `epoch` (0-based).
    pub fn lr(&self, base: f64, epoch: usize) -> f64 {
        match *self {
            SchedulerSpec::Constant => base,
            SchedulerSpec::Step { period, factor } => base * math::pow(factor, (epoch / period) as f64),
            SchedulerSpec::Cosine { t_max, lr_min } => {
                let t = epoch.min(t_max) as f64 / t_max as f64;
                lr_min + (base - lr_min) * 0.5 * (1.0 + math::cos(math::PI * t))
            }
        }
    }
}
