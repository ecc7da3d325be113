//! File formats, JSON configuration, parallel search and the benchmark
//! harness around [`ssl_forge_core`].
//!
//! - [`table`]: the CSV dataset format
//! - [`config`]: experiment and suite configs
//! - [`runner`]: one experiment end to end, producing an [`runner::ExperimentResult`]
//! - [`bench`]: suites of experiments over several seeds
//! - [`search`]: rayon execution of search plans
//! - [`eval`]: prediction files and scoring them

pub mod bench;
pub mod config;
pub mod error;
pub mod eval;
pub mod report;
pub mod runner;
pub mod search;
pub mod synthetic;
pub mod table;

pub use error::{Error, Result};
