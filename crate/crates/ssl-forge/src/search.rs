//! Parallel execution of search plans.

use rayon::prelude::*;
use ssl_forge_core::model_selection::{SearchPlan, SearchResult};

use crate::error::{Error, Result};

pub const THREADS_VAR: &str = "SSL_FORGE_THREADS";

/// Thread cap from `SSL_FORGE_THREADS`; `None` when unset or empty.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_VAR} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

/// A pool honouring the thread cap. Without a cap rayon picks the size.
pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))
}

/// Runs every (candidate, fold) job on the current rayon pool. The result
/// does not depend on the number of threads.
pub fn run_parallel(plan: &SearchPlan) -> Result<SearchResult> {
    let jobs: Vec<_> = (0..plan.n_jobs()).into_par_iter().map(|j| plan.run_job(j)).collect();
    Ok(plan.finish(jobs)?)
}
