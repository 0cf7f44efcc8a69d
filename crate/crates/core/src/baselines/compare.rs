//! The three methods evaluated on identical discovery/validation splits.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bootstrap::{
    bootstrap_run, check_bootstrap_inputs, summarize, BootstrapConfig, BootstrapRun, BootstrapSummary, ProposedRanker,
    SurvivalRanker,
};
use crate::data::Cohort;
use crate::Result;

use super::{CoxL1Config, CoxRanker, SsvmConfig, SsvmRanker};

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CompareConfig {
    pub bootstrap: BootstrapConfig,
    pub ssvm: SsvmConfig,
    pub cox: CoxL1Config,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MethodRow {
    pub method: String,
    pub combined_p: f64,
    pub c_mean: f64,
    pub c_std: f64,
    pub failed_runs: usize,
}

impl MethodRow {
    pub fn from_summary(summary: &BootstrapSummary) -> Self {
        Self {
            method: summary.method.clone(),
            combined_p: summary.combined_p,
            c_mean: summary.c_mean,
            c_std: summary.c_std,
            failed_runs: summary.failed_runs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonTable {
    pub rows: Vec<MethodRow>,
    pub summaries: Vec<BootstrapSummary>,
}

impl ComparisonTable {
    pub fn from_summaries(summaries: Vec<BootstrapSummary>) -> Self {
        Self { rows: summaries.iter().map(MethodRow::from_summary).collect(), summaries }
    }

    pub fn row(&self, method: &str) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

pub struct Rankers {
    pub proposed: ProposedRanker,
    pub ssvm: SsvmRanker,
    pub cox: CoxRanker,
}

impl Rankers {
    pub fn new(config: &CompareConfig) -> Self {
        Self {
            proposed: ProposedRanker { config: config.bootstrap.train.clone() },
            ssvm: SsvmRanker { config: config.ssvm.clone() },
            cox: CoxRanker { config: config.cox.clone() },
        }
    }

    /// Table order: proposed, ssvm, cox_l1.
    pub fn all(&self) -> [&dyn SurvivalRanker; 3] {
        [&self.proposed, &self.ssvm, &self.cox]
    }
}

pub fn validate_compare(cohort: &Cohort, config: &CompareConfig) -> Result<()> {
    check_bootstrap_inputs(cohort, &config.bootstrap)?;
    config.ssvm.validate()
}

/// Runs every method over `0..config.bootstrap.runs`. Run `b` uses the same split for all
/// methods because the split depends only on the base seed and `b`.
pub fn compare_methods(cohort: &Cohort, config: &CompareConfig) -> Result<ComparisonTable> {
    validate_compare(cohort, config)?;
    let rankers = Rankers::new(config);
    let mut summaries = Vec::new();
    for ranker in rankers.all() {
        let runs: Vec<BootstrapRun> =
            (0..config.bootstrap.runs).map(|b| bootstrap_run(cohort, &config.bootstrap, ranker, b)).collect();
        summaries.push(summarize(cohort, &config.bootstrap, ranker.name(), ranker.orientation(), runs)?);
    }
    Ok(ComparisonTable::from_summaries(summaries))
}
