use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::Adam;
use super::objective::PairwiseHinge;
use super::scorer::bipolar_sigmoid;
use crate::data::{Cohort, ScalingParams};
use crate::math::{dot, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TrainConfig {
    pub lambda: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Minimum improvement of the best objective that resets the patience counter.
    pub tolerance: f64,
    pub patience: usize,
    /// Per-epoch pair budget; gradients use a uniform sample when `|P|` exceeds it.
    pub pair_subsample: Option<usize>,
    pub seed: u64,
    /// Appends a constant covariate (an unpenalized bias) to the scorer.
    pub intercept: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 0.01,
            learning_rate: 0.01,
            max_epochs: 2000,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            tolerance: 1e-6,
            patience: 50,
            pair_subsample: Some(200_000),
            seed: 0,
            intercept: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be finite and >= 0");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return bad("moment decays must lie in (0, 1)");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if self.pair_subsample == Some(0) {
            return bad("pair_subsample must be positive when set");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EpochRecord {
    pub epoch: usize,
    pub objective: f64,
    /// Lowest objective seen up to and including this epoch.
    pub best_objective: f64,
}

/// Weights fitted on already-scaled covariates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankingFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub history: Vec<EpochRecord>,
    pub converged: bool,
    pub n_pairs: usize,
}

/// Adam on the pairwise hinge objective from `w = 0`, keeping the best iterate.
pub fn train_scaled(x: &Matrix, times: &[f64], events: &[bool], config: &TrainConfig) -> Result<RankingFit> {
    config.validate()?;
    let d = x.cols();
    let with_bias;
    let design = if config.intercept {
        with_bias = x.with_constant_column();
        &with_bias
    } else {
        x
    };
    let loss = PairwiseHinge::new(design, times, events)?;
    let dim = design.cols();
    let mut w = alloc::vec![0.0; dim];
    let mut adam = Adam::new(dim, config.learning_rate, config.beta1, config.beta2, config.epsilon);
    let sample = config.pair_subsample.filter(|&cap| loss.n_pairs() > cap);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut best_w = w.clone();
    let mut best = f64::INFINITY;
    let mut reference = f64::INFINITY;
    let mut stall = 0usize;
    let mut converged = false;
    let mut history = Vec::new();
    for epoch in 0..=config.max_epochs {
        let (q, full_grad) = loss.evaluate(&w, config.lambda, d);
        if q < best {
            best = q;
            best_w.copy_from_slice(&w);
        }
        if q < reference - config.tolerance {
            reference = q;
            stall = 0;
        } else {
            stall += 1;
        }
        history.push(EpochRecord { epoch, objective: q, best_objective: best });
        if stall >= config.patience {
            converged = true;
            break;
        }
        if epoch == config.max_epochs {
            break;
        }
        let grad = match sample {
            Some(m) => loss.sampled_gradient(&w, config.lambda, d, m, &mut rng),
            None => full_grad,
        };
        adam.step(&mut w, &grad);
        if w.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    let bias = if config.intercept { best_w.pop().unwrap_or(0.0) } else { 0.0 };
    Ok(RankingFit { weights: best_w, bias, objective: best, history, converged, n_pairs: loss.n_pairs() })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainedModel {
    pub covariates: Vec<String>,
    pub scaling: ScalingParams,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: TrainConfig,
    pub final_objective: f64,
    pub converged: bool,
    pub history: Vec<EpochRecord>,
}

impl TrainedModel {
    /// Survival score of one raw covariate row.
    pub fn score_raw(&self, x_raw: &[f64]) -> Result<f64> {
        let mut scaled = alloc::vec![0.0; x_raw.len()];
        self.scaling.apply_row(x_raw, &mut scaled)?;
        Ok(bipolar_sigmoid(dot(&self.weights, &scaled) + self.bias))
    }
}

/// Fits the range scaling on `discovery` and trains on the scaled covariates.
pub fn train(discovery: &Cohort, config: &TrainConfig) -> Result<TrainedModel> {
    let raw = discovery.raw_matrix();
    let scaling = ScalingParams::fit(&raw);
    let x = scaling.apply(&raw)?;
    let fit = train_scaled(&x, &discovery.times(), &discovery.events(), config)?;
    Ok(TrainedModel {
        covariates: discovery.schema().names().map(String::from).collect(),
        scaling,
        weights: fit.weights,
        bias: fit.bias,
        config: config.clone(),
        final_objective: fit.objective,
        converged: fit.converged,
        history: fit.history,
    })
}

pub fn predict(model: &TrainedModel, cohort: &Cohort) -> Result<Vec<f64>> {
    let names: Vec<&str> = cohort.schema().names().collect();
    if names.len() != model.covariates.len() || names.iter().zip(&model.covariates).any(|(a, b)| a != b) {
        return Err(Error::Schema("cohort covariates do not match the model".into()));
    }
    cohort.records().iter().map(|r| model.score_raw(&r.x_raw)).collect()
}
