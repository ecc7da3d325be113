//! Co-training and tri-training over pluggable base learners.

mod co_training;
mod tri_training;

pub use co_training::{co_training_fit, CoTrainingConfig, CoTrainingModel, ViewSplit};
pub use tri_training::{tri_decide, tri_training_fit, TriDecision, TriTrainingConfig, TriTrainingModel, TriUpdate};
