//! Repeated discovery/validation runs and the sparse risk formula built from them.
//!
//! Each run `b` splits the cohort 60/40 with event stratification, fits range scaling and
//! weights on the discovery part, stratifies the validation part at the median discovery
//! score and records the log-rank p-value and concordance. Runs are pure functions of
//! `(cohort, config, b)`, so they can be evaluated in any order or in parallel.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{split_indices, Cohort, ScalingParams};
use crate::math::{derive_seed, l1_norm, mean, median, std_dev, Matrix};
use crate::model::{bipolar_sigmoid, predict, train_scaled, TrainConfig, TrainedModel};
use crate::stats::{concordance_index, km_estimate, logrank_test, risk_concordance, ConcordanceResult, Group, KmCurve, LogRankResult};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BootstrapConfig {
    pub runs: usize,
    pub discovery_fraction: f64,
    pub top_k: usize,
    pub train: TrainConfig,
    pub seed: u64,
    /// Shuffles per run for the permuted-outcome concordance baseline; 0 disables it.
    pub baseline_shuffles: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            runs: 1000,
            discovery_fraction: 0.6,
            top_k: 3,
            train: TrainConfig::default(),
            seed: 0,
            baseline_shuffles: 10,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self, covariates: usize) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("at least one bootstrap run is required".into()));
        }
        if !(self.discovery_fraction > 0.0 && self.discovery_fraction < 1.0) {
            return Err(Error::InvalidConfig("discovery fraction must lie in (0, 1)".into()));
        }
        if self.top_k == 0 || self.top_k > covariates {
            return Err(Error::InvalidConfig(format!(
                "K must lie in 1..={covariates}, got {}",
                self.top_k
            )));
        }
        self.train.validate()
    }

    /// Seed of run `b`; shared by every method so their splits coincide.
    pub fn run_seed(&self, b: usize) -> u64 {
        derive_seed(self.seed, b as u64)
    }
}

/// A method that learns a linear scorer on scaled covariates.
pub trait SurvivalRanker: Sync {
    fn name(&self) -> &'static str;

    fn fit(&self, x: &Matrix, times: &[f64], events: &[bool], seed: u64) -> Result<Vec<f64>>;

    /// Scores oriented so that higher means longer predicted survival.
    fn survival_scores(&self, weights: &[f64], x: &Matrix) -> Vec<f64>;

    /// `+1` when the weights point towards longer survival, `-1` when towards higher risk.
    fn orientation(&self) -> f64 {
        1.0
    }
}

/// The L1 pairwise ranking model.
#[derive(Debug, Clone)]
pub struct ProposedRanker {
    pub config: TrainConfig,
}

impl SurvivalRanker for ProposedRanker {
    fn name(&self) -> &'static str {
        "proposed"
    }

    fn fit(&self, x: &Matrix, times: &[f64], events: &[bool], seed: u64) -> Result<Vec<f64>> {
        let config = TrainConfig { seed, ..self.config.clone() };
        // A bias shifts every score monotonically and cannot change stratification or C.
        Ok(train_scaled(x, times, events, &config)?.weights)
    }

    fn survival_scores(&self, weights: &[f64], x: &Matrix) -> Vec<f64> {
        x.mul_vec(weights).into_iter().map(bipolar_sigmoid).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RunFailure {
    Fit(String),
    ZeroNormWeights,
    EmptyStratum,
    DegenerateLogRank,
    NoValidationPairs,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BootstrapRun {
    pub index: usize,
    pub seed: u64,
    pub discovery: Vec<usize>,
    pub weights: Vec<f64>,
    /// Median discovery score.
    pub cutoff: Option<f64>,
    pub high_risk: usize,
    pub low_risk: usize,
    pub p_value: Option<f64>,
    pub c_index: Option<f64>,
    pub baseline_c: Option<f64>,
    pub failure: Option<RunFailure>,
}

impl BootstrapRun {
    fn failed(index: usize, seed: u64, discovery: Vec<usize>, weights: Vec<f64>, failure: RunFailure) -> Self {
        Self {
            index,
            seed,
            discovery,
            weights,
            cutoff: None,
            high_risk: 0,
            low_risk: 0,
            p_value: None,
            c_index: None,
            baseline_c: None,
            failure: Some(failure),
        }
    }

    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RiskGroup {
    High,
    Low,
}

/// Labels survival scores against the median of `reference`: `score <= median` is high risk.
pub fn stratify_by_median(scores: &[f64], reference: &[f64]) -> Result<(f64, Vec<RiskGroup>)> {
    let cutoff = median(reference).ok_or(Error::EmptyInput("median cutoff needs reference scores"))?;
    let groups = scores
        .iter()
        .map(|&s| if s <= cutoff { RiskGroup::High } else { RiskGroup::Low })
        .collect();
    Ok((cutoff, groups))
}

/// Labels risk scores against the median of `reference`: `risk >= median` is high risk.
pub fn stratify_risk_by_median(risks: &[f64], reference: &[f64]) -> Result<(f64, Vec<RiskGroup>)> {
    let cutoff = median(reference).ok_or(Error::EmptyInput("median cutoff needs reference scores"))?;
    let groups = risks
        .iter()
        .map(|&r| if r >= cutoff { RiskGroup::High } else { RiskGroup::Low })
        .collect();
    Ok((cutoff, groups))
}

/// Splits outcomes by group label into (high, low).
pub fn outcomes_by_group(times: &[f64], events: &[bool], groups: &[RiskGroup]) -> [(Vec<f64>, Vec<bool>); 2] {
    let mut high = (Vec::new(), Vec::new());
    let mut low = (Vec::new(), Vec::new());
    for ((&t, &e), g) in times.iter().zip(events).zip(groups) {
        let side = if *g == RiskGroup::High { &mut high } else { &mut low };
        side.0.push(t);
        side.1.push(e);
    }
    [high, low]
}

/// Evaluates run `b`. Failures are recorded in the run rather than returned.
pub fn bootstrap_run<R: SurvivalRanker + ?Sized>(cohort: &Cohort, config: &BootstrapConfig, ranker: &R, b: usize) -> BootstrapRun {
    let seed = config.run_seed(b);
    let split = match split_indices(&cohort.events(), config.discovery_fraction, seed) {
        Ok(s) => s,
        Err(e) => return BootstrapRun::failed(b, seed, Vec::new(), Vec::new(), RunFailure::Fit(e.to_string())),
    };
    let discovery = cohort.subset(&split.discovery);
    let validation = cohort.subset(&split.validation);
    let raw = discovery.raw_matrix();
    let scaling = ScalingParams::fit(&raw);
    let (x_disc, x_val) = match (scaling.apply(&raw), scaling.apply(&validation.raw_matrix())) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return BootstrapRun::failed(b, seed, split.discovery, Vec::new(), RunFailure::Fit(e.to_string()))
        }
    };
    let weights = match ranker.fit(&x_disc, &discovery.times(), &discovery.events(), derive_seed(seed, 1)) {
        Ok(w) => w,
        Err(e) => return BootstrapRun::failed(b, seed, split.discovery, Vec::new(), RunFailure::Fit(e.to_string())),
    };
    if !(l1_norm(&weights) > 0.0) {
        return BootstrapRun::failed(b, seed, split.discovery, weights, RunFailure::ZeroNormWeights);
    }

    let disc_scores = ranker.survival_scores(&weights, &x_disc);
    let val_scores = ranker.survival_scores(&weights, &x_val);
    let (val_times, val_events) = (validation.times(), validation.events());
    let (cutoff, groups) = match stratify_by_median(&val_scores, &disc_scores) {
        Ok(v) => v,
        Err(e) => return BootstrapRun::failed(b, seed, split.discovery, weights, RunFailure::Fit(e.to_string())),
    };
    let [high, low] = outcomes_by_group(&val_times, &val_events, &groups);
    let mut run = BootstrapRun::failed(b, seed, split.discovery, weights, RunFailure::EmptyStratum);
    run.cutoff = Some(cutoff);
    run.high_risk = high.0.len();
    run.low_risk = low.0.len();
    if high.0.is_empty() || low.0.is_empty() {
        return run;
    }
    let Ok(test) = logrank_test(Group::new(&high.0, &high.1), Group::new(&low.0, &low.1)) else {
        run.failure = Some(RunFailure::DegenerateLogRank);
        return run;
    };
    let Ok(c) = concordance_index(&val_scores, &val_times, &val_events) else {
        run.failure = Some(RunFailure::NoValidationPairs);
        return run;
    };
    if config.baseline_shuffles > 0 {
        run.baseline_c = shuffled_concordance(
            &val_scores,
            &val_times,
            &val_events,
            config.baseline_shuffles,
            derive_seed(seed, 2),
        )
        .ok()
        .map(|s| s.mean);
    }
    run.p_value = Some(test.p_value);
    run.c_index = Some(c.c_index);
    run.failure = None;
    run
}

/// `p_B = min(1, 2 · median(p))`.
pub fn combine_p_values(p_values: &[f64]) -> Result<f64> {
    if p_values.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
        return Err(Error::InvalidConfig("p-values must lie in (0, 1]".into()));
    }
    let m = median(p_values).ok_or(Error::EmptyInput("no p-values to combine"))?;
    Ok((2.0 * m).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AggregatedWeights {
    /// Elementwise median of the L1-normalized weight vectors.
    pub median: Vec<f64>,
    /// L1-normalized vectors that entered the median, in input order.
    pub normalized: Vec<Vec<f64>>,
    pub zero_norm_runs: usize,
}

pub fn aggregate_weights(weights: &[Vec<f64>]) -> Result<AggregatedWeights> {
    let first = weights.first().ok_or(Error::EmptyInput("no weight vectors to aggregate"))?;
    let d = first.len();
    if let Some(w) = weights.iter().find(|w| w.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: w.len() });
    }
    let mut normalized = Vec::with_capacity(weights.len());
    let mut zero_norm_runs = 0;
    for w in weights {
        let norm = l1_norm(w);
        if norm > 0.0 {
            normalized.push(w.iter().map(|v| v / norm).collect::<Vec<f64>>());
        } else {
            zero_norm_runs += 1;
        }
    }
    if normalized.is_empty() {
        return Err(Error::Validation("every weight vector has zero L1 norm".into()));
    }
    let median = (0..d)
        .map(|k| {
            let column: Vec<f64> = normalized.iter().map(|w| w[k]).collect();
            crate::math::median(&column).unwrap_or(0.0)
        })
        .collect();
    Ok(AggregatedWeights { median, normalized, zero_norm_runs })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RiskTerm {
    pub covariate: String,
    /// Column in the schema the formula was built on; `apply_risk` resolves by name instead.
    #[cfg_attr(feature = "serde", serde(default))]
    pub index: usize,
    /// Risk per raw unit of the covariate.
    pub coefficient: f64,
}

/// `r(x') = Σ coefficient_k · x'_k + bias` over raw covariates; higher = higher risk.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RiskFormula {
    pub terms: Vec<RiskTerm>,
    pub bias: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub k: usize,
    /// Set when the K-th and (K+1)-th magnitudes tie and the lower index was kept.
    #[cfg_attr(feature = "serde", serde(default))]
    pub tie_at_cutoff: bool,
}

impl RiskFormula {
    /// Risk of one raw covariate row in the column layout the formula was built on.
    pub fn evaluate(&self, x_raw: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.coefficient * x_raw[t.index]).sum::<f64>() + self.bias
    }
}

/// Keeps the `k` largest-magnitude survival weights, maps them back to raw units and flips
/// the sign so the formula scores risk. The bias puts the profile at every retained
/// covariate's minimum at risk 0.
pub fn build_risk_formula(aggregated: &[f64], scaling: &ScalingParams, names: &[String], k: usize) -> Result<RiskFormula> {
    let d = aggregated.len();
    if scaling.len() != d || names.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: scaling.len().min(names.len()) });
    }
    if k == 0 || k > d {
        return Err(Error::InvalidConfig(format!("K must lie in 1..={d}, got {k}")));
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| aggregated[b].abs().total_cmp(&aggregated[a].abs()).then(a.cmp(&b)));
    let tie_at_cutoff = k < d && aggregated[order[k - 1]].abs() == aggregated[order[k]].abs();
    let mut kept: Vec<usize> = order[..k].to_vec();
    kept.sort_unstable();

    let mut terms = Vec::with_capacity(k);
    let mut bias = 0.0;
    for idx in kept {
        if scaling.is_constant(idx) {
            return Err(Error::ConstantCovariate(names[idx].clone()));
        }
        let coefficient = -aggregated[idx] / scaling.range(idx);
        bias -= coefficient * scaling.min[idx];
        terms.push(RiskTerm { covariate: names[idx].clone(), index: idx, coefficient });
    }
    Ok(RiskFormula { terms, bias, k, tie_at_cutoff })
}

/// Evaluates the formula on a cohort, resolving covariates by name.
pub fn apply_risk(formula: &RiskFormula, cohort: &Cohort) -> Result<Vec<f64>> {
    let columns: Vec<usize> = formula
        .terms
        .iter()
        .map(|t| cohort.schema().index_of(&t.covariate).ok_or_else(|| Error::UnknownCovariate(t.covariate.clone())))
        .collect::<Result<_>>()?;
    Ok(cohort
        .records()
        .iter()
        .map(|r| {
            formula.terms.iter().zip(&columns).map(|(t, &c)| t.coefficient * r.x_raw[c]).sum::<f64>() + formula.bias
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShuffleBaseline {
    pub mean: f64,
    pub std: f64,
    pub shuffles: usize,
    pub retries: usize,
}

/// Maximum number of degenerate shuffles tolerated before giving up.
pub const MAX_SHUFFLE_RETRIES: usize = 100;

/// C-index of fixed scores against jointly permuted `(time, event)` outcomes.
pub fn shuffled_concordance(scores: &[f64], times: &[f64], events: &[bool], shuffles: usize, seed: u64) -> Result<ShuffleBaseline> {
    if shuffles == 0 {
        return Err(Error::InvalidConfig("at least one shuffle is required".into()));
    }
    let n = scores.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut t = vec![0.0; n];
    let mut e = vec![false; n];
    let mut values = Vec::with_capacity(shuffles);
    let mut retries = 0;
    while values.len() < shuffles {
        perm.shuffle(&mut rng);
        for (k, &p) in perm.iter().enumerate() {
            t[k] = times[p];
            e[k] = events[p];
        }
        match concordance_index(scores, &t, &e) {
            Ok(c) => values.push(c.c_index),
            Err(Error::NoComparablePairs) if retries < MAX_SHUFFLE_RETRIES => retries += 1,
            Err(err) => return Err(err),
        }
    }
    Ok(ShuffleBaseline {
        mean: mean(&values).unwrap_or(0.5),
        std: std_dev(&values).unwrap_or(0.0),
        shuffles,
        retries,
    })
}

/// Shuffled-outcome baseline for a trained model on a validation cohort.
pub fn shuffled_time_baseline(model: &TrainedModel, validation: &Cohort, shuffles: usize, seed: u64) -> Result<ShuffleBaseline> {
    let scores = predict(model, validation)?;
    shuffled_concordance(&scores, &validation.times(), &validation.events(), shuffles, seed)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BootstrapSummary {
    pub method: String,
    pub covariates: Vec<String>,
    pub runs: Vec<BootstrapRun>,
    pub failed_runs: usize,
    pub combined_p: f64,
    pub c_mean: f64,
    pub c_std: f64,
    pub baseline_c_mean: Option<f64>,
    pub aggregated: AggregatedWeights,
    /// Run index of each row of `aggregated.normalized`.
    pub weight_runs: Vec<usize>,
    pub formula: RiskFormula,
}

/// Combines finished runs. Runs are sorted by index first, so input order does not matter.
pub fn summarize(cohort: &Cohort, config: &BootstrapConfig, method: &str, orientation: f64, mut runs: Vec<BootstrapRun>) -> Result<BootstrapSummary> {
    runs.sort_by_key(|r| r.index);
    let ok: Vec<&BootstrapRun> = runs.iter().filter(|r| r.succeeded()).collect();
    if ok.is_empty() {
        return Err(Error::AllRunsFailed(runs.len()));
    }
    let p: Vec<f64> = ok.iter().filter_map(|r| r.p_value).collect();
    let c: Vec<f64> = ok.iter().filter_map(|r| r.c_index).collect();
    let baseline: Vec<f64> = ok.iter().filter_map(|r| r.baseline_c).collect();
    let weights: Vec<Vec<f64>> = ok.iter().map(|r| r.weights.clone()).collect();
    let aggregated = aggregate_weights(&weights)?;

    let names: Vec<String> = cohort.schema().names().map(String::from).collect();
    let oriented: Vec<f64> = aggregated.median.iter().map(|v| v * orientation).collect();
    let scaling = ScalingParams::fit(&cohort.raw_matrix());
    let formula = build_risk_formula(&oriented, &scaling, &names, config.top_k)?;
    Ok(BootstrapSummary {
        method: method.to_string(),
        covariates: names,
        failed_runs: runs.len() - ok.len(),
        combined_p: combine_p_values(&p)?,
        c_mean: mean(&c).unwrap_or(0.5),
        c_std: std_dev(&c).unwrap_or(0.0),
        baseline_c_mean: mean(&baseline),
        weight_runs: ok.iter().map(|r| r.index).collect(),
        aggregated,
        formula,
        runs,
    })
}

pub fn check_bootstrap_inputs(cohort: &Cohort, config: &BootstrapConfig) -> Result<()> {
    config.validate(cohort.arity())?;
    cohort.require_events(4)
}

pub fn run_bootstrap_with<R: SurvivalRanker + ?Sized>(cohort: &Cohort, config: &BootstrapConfig, ranker: &R) -> Result<BootstrapSummary> {
    check_bootstrap_inputs(cohort, config)?;
    let runs = (0..config.runs).map(|b| bootstrap_run(cohort, config, ranker, b)).collect();
    summarize(cohort, config, ranker.name(), ranker.orientation(), runs)
}

/// The full pipeline with the proposed ranking model.
pub fn run_bootstrap(cohort: &Cohort, config: &BootstrapConfig) -> Result<BootstrapSummary> {
    run_bootstrap_with(cohort, config, &ProposedRanker { config: config.train.clone() })
}

/// The risk formula applied to a whole cohort and split at the cohort's own median risk.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CohortStratification {
    pub risks: Vec<f64>,
    pub cutoff: f64,
    pub groups: Vec<RiskGroup>,
    pub logrank: LogRankResult,
    pub concordance: ConcordanceResult,
    pub km_high: KmCurve,
    pub km_low: KmCurve,
}

pub fn stratify_cohort(risks: Vec<f64>, cohort: &Cohort) -> Result<CohortStratification> {
    let (times, events) = (cohort.times(), cohort.events());
    let (cutoff, groups) = stratify_risk_by_median(&risks, &risks)?;
    let [high, low] = outcomes_by_group(&times, &events, &groups);
    if high.0.is_empty() || low.0.is_empty() {
        return Err(Error::DegenerateTest("median split left one risk group empty".into()));
    }
    let logrank = logrank_test(Group::new(&high.0, &high.1), Group::new(&low.0, &low.1))?;
    let concordance = risk_concordance(&risks, &times, &events)?;
    Ok(CohortStratification {
        km_high: km_estimate(&high.0, &high.1)?,
        km_low: km_estimate(&low.0, &low.1)?,
        risks,
        cutoff,
        groups,
        logrank,
        concordance,
    })
}
