//! Linear SVM solver, transductive SVM and Laplacian SVM.

mod lapsvm;
mod linear;
mod tsvm;

pub use lapsvm::{lapsvm_fit, minimize, rbf_gram, KernelModel, LapSvmConfig, LapSvmProblem, LapSvmRun};
pub use linear::{linear_svm_fit, primal_objective, LinearSvmConfig, LinearSvmModel};
pub use tsvm::{tsvm_fit, SwapRecord, TsvmConfig, TsvmModel};
