//! A small fully connected network with hand-written backpropagation and
//! one training loop shared by pseudo-labeling, Π-model, mean teacher and
//! Π-model regression.

pub mod mlp;
pub mod optim;
pub mod trainer;

pub use mlp::{consistency_mse, mlp_forward, mse, softmax_cross_entropy, Forward, Mlp};
pub use optim::{Optimizer, OptimizerSpec, SchedulerSpec};
pub use trainer::{ema_momentum, ramp_weight, trainer_fit, trainer_fit_observed, NeuralModel, Strategy, TrainConfig};
