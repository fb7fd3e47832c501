use rayon::prelude::*;

use super::engine::run;
use super::setup::{Scenario, SimConfig};
use super::trace::TraceLog;
use crate::error::{Error, Result};
use crate::roadnet::RoadNetwork;

/// Environment variable capping batch parallelism; 0 or unset means one
/// worker per core.
pub const THREADS_ENV: &str = "ROADTWIN_THREADS";

#[derive(Debug, Clone)]
pub struct BatchJob {
    pub network: RoadNetwork,
    pub scenario: Scenario,
    pub config: SimConfig,
}

pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`"))),
    }
}

/// Run independent jobs in parallel. Results keep the input order, so the
/// output does not depend on the worker count.
pub fn run_batch(jobs: &[BatchJob], threads: usize) -> Result<Vec<Result<TraceLog>>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| {
        jobs.par_iter()
            .map(|j| run(&j.network, &j.scenario, &j.config))
            .collect()
    }))
}
