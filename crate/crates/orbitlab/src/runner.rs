//! Parallel trial execution with deterministic results.

use std::time::Instant;

use orbitlab_core::experiments::{Experiment, ExperimentConfig, ExperimentReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Run information that legitimately differs between identical runs. Kept
/// under its own key so reports can be compared without it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub wall_time_ms: u128,
    pub workers: usize,
    pub version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] orbitlab_core::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Runs all trials on `workers` threads (0 = one per core). Records are
/// collected by index, so the report does not depend on `workers`.
pub fn run_parallel(config: ExperimentConfig, workers: usize) -> Result<(ExperimentReport, Metadata), RunError> {
    let start = Instant::now();
    let exp = Experiment::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let used = pool.current_num_threads();
    let records = pool.install(|| {
        (0..exp.trial_count())
            .into_par_iter()
            .map(|i| exp.run_trial(i))
            .collect::<Vec<_>>()
    });
    let report = exp.assemble(records);
    let meta = Metadata {
        wall_time_ms: start.elapsed().as_millis(),
        workers: used,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok((report, meta))
}
