//! Bootstrap runs spread over a worker pool. Results are identical for any worker count:
//! each run depends only on its index, and runs are collected in index order.

use rayon::prelude::*;
use survrank_core::baselines::{validate_compare, CompareConfig, ComparisonTable, Rankers};
use survrank_core::bootstrap::{bootstrap_run, check_bootstrap_inputs, summarize, BootstrapConfig, BootstrapSummary, SurvivalRanker};
use survrank_core::data::Cohort;

use crate::error::{CliError, CliResult};

pub fn worker_pool(workers: usize) -> CliResult<rayon::ThreadPool> {
    if workers == 0 {
        return Err(CliError::validation("--workers must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::runtime(format!("cannot start workers: {e}")))
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn summary_for(
    pool: &rayon::ThreadPool,
    cohort: &Cohort,
    config: &BootstrapConfig,
    ranker: &dyn SurvivalRanker,
) -> CliResult<BootstrapSummary> {
    let runs = pool.install(|| {
        (0..config.runs).into_par_iter().map(|b| bootstrap_run(cohort, config, ranker, b)).collect()
    });
    Ok(summarize(cohort, config, ranker.name(), ranker.orientation(), runs)?)
}

pub fn bootstrap_parallel(
    pool: &rayon::ThreadPool,
    cohort: &Cohort,
    config: &BootstrapConfig,
    ranker: &dyn SurvivalRanker,
) -> CliResult<BootstrapSummary> {
    check_bootstrap_inputs(cohort, config)?;
    summary_for(pool, cohort, config, ranker)
}

pub fn compare_parallel(pool: &rayon::ThreadPool, cohort: &Cohort, config: &CompareConfig) -> CliResult<ComparisonTable> {
    validate_compare(cohort, config)?;
    let rankers = Rankers::new(config);
    let summaries = rankers
        .all()
        .into_iter()
        .map(|r| summary_for(pool, cohort, &config.bootstrap, r))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ComparisonTable::from_summaries(summaries))
}
