//! Ranking survival SVM: linear scorer, squared hinge on pairwise margins, L2 penalty.

use alloc::vec;
use alloc::vec::Vec;

use crate::bootstrap::SurvivalRanker;
use crate::data::{Cohort, PairSet, ScalingParams};
use crate::math::Matrix;
use crate::model::{Adam, EpochRecord};
use crate::sweep::PairSweep;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SsvmConfig {
    pub l2_weight: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
    pub patience: usize,
    pub seed: u64,
}

impl Default for SsvmConfig {
    fn default() -> Self {
        Self { l2_weight: 0.1, learning_rate: 0.01, max_epochs: 2000, tolerance: 1e-6, patience: 50, seed: 0 }
    }
}

impl SsvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_weight >= 0.0 && self.l2_weight.is_finite()) {
            return Err(Error::InvalidConfig("SSVM L2 weight must be finite and >= 0".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) || self.max_epochs == 0 {
            return Err(Error::InvalidConfig("SSVM learning rate and epochs must be positive".into()));
        }
        Ok(())
    }
}

/// `l2 ‖w‖² + mean over pairs of max(0, 1 - (wᵀx_i - wᵀx_j))²` over an explicit pair set.
pub fn ssvm_objective(w: &[f64], x: &Matrix, pairs: &PairSet, l2_weight: f64) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::NoComparablePairs);
    }
    let z = x.mul_vec(w);
    let loss: f64 = pairs
        .iter()
        .map(|&(i, j)| {
            let h = (1.0 - (z[i] - z[j])).max(0.0);
            h * h
        })
        .sum();
    Ok(l2_weight * w.iter().map(|v| v * v).sum::<f64>() + loss / pairs.len() as f64)
}

pub fn ssvm_gradient(w: &[f64], x: &Matrix, pairs: &PairSet, l2_weight: f64) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Err(Error::NoComparablePairs);
    }
    let z = x.mul_vec(w);
    let mut coef = vec![0.0; x.rows()];
    for &(i, j) in pairs.iter() {
        let h = (1.0 - (z[i] - z[j])).max(0.0);
        coef[i] -= 2.0 * h;
        coef[j] += 2.0 * h;
    }
    let scale = 1.0 / pairs.len() as f64;
    coef.iter_mut().for_each(|c| *c *= scale);
    let mut grad: Vec<f64> = w.iter().map(|v| 2.0 * l2_weight * v).collect();
    x.add_transpose_mul(&coef, &mut grad);
    Ok(grad)
}

/// Squared-hinge objective evaluated by a time sweep.
#[derive(Debug, Clone)]
pub struct SquaredHinge<'a> {
    x: &'a Matrix,
    sweep: PairSweep,
}

impl<'a> SquaredHinge<'a> {
    pub fn new(x: &'a Matrix, times: &[f64], events: &[bool]) -> Result<Self> {
        if times.len() != x.rows() || events.len() != x.rows() {
            return Err(Error::DimensionMismatch { expected: x.rows(), found: times.len() });
        }
        let sweep = PairSweep::new(times, events);
        if sweep.n_pairs() == 0 {
            return Err(Error::NoComparablePairs);
        }
        Ok(Self { x, sweep })
    }

    pub fn evaluate(&self, w: &[f64], l2_weight: f64) -> (f64, Vec<f64>) {
        let z = self.x.mul_vec(w);
        let stats = self.sweep.active(&z, 1.0);
        let mut loss = 0.0;
        let mut coef = vec![0.0; z.len()];
        for k in 0..z.len() {
            // As the event j: Σ_i (1 + z_j - z_i) and its square over active partners.
            let [cnt, s1, s2] = stats.as_short[k];
            let a = 1.0 + z[k];
            loss += cnt * a * a - 2.0 * a * s1 + s2;
            coef[k] += 2.0 * (cnt * a - s1);
            // As the longer member i: Σ_j (1 - z_i + z_j).
            let [cnt_l, s1_l] = stats.as_long[k];
            coef[k] -= 2.0 * (cnt_l * (1.0 - z[k]) + s1_l);
        }
        let scale = 1.0 / self.sweep.n_pairs() as f64;
        coef.iter_mut().for_each(|c| *c *= scale);
        let mut grad: Vec<f64> = w.iter().map(|v| 2.0 * l2_weight * v).collect();
        self.x.add_transpose_mul(&coef, &mut grad);
        let value = l2_weight * w.iter().map(|v| v * v).sum::<f64>() + loss * scale;
        (value, grad)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SsvmFit {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub history: Vec<EpochRecord>,
    pub converged: bool,
}

pub fn train_ssvm_scaled(x: &Matrix, times: &[f64], events: &[bool], config: &SsvmConfig) -> Result<SsvmFit> {
    config.validate()?;
    let loss = SquaredHinge::new(x, times, events)?;
    let mut w = vec![0.0; x.cols()];
    let mut adam = Adam::new(x.cols(), config.learning_rate, 0.9, 0.999, 1e-8);
    let mut best_w = w.clone();
    let (mut best, mut reference) = (f64::INFINITY, f64::INFINITY);
    let mut stall = 0;
    let mut converged = false;
    let mut history = Vec::new();
    for epoch in 0..=config.max_epochs {
        let (q, grad) = loss.evaluate(&w, config.l2_weight);
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
        adam.step(&mut w, &grad);
    }
    Ok(SsvmFit { weights: best_w, objective: best, history, converged })
}

/// Fits range scaling on `discovery` and trains on the scaled covariates.
pub fn train_ssvm(discovery: &Cohort, config: &SsvmConfig) -> Result<SsvmFit> {
    let raw = discovery.raw_matrix();
    let x = ScalingParams::fit(&raw).apply(&raw)?;
    train_ssvm_scaled(&x, &discovery.times(), &discovery.events(), config)
}

#[derive(Debug, Clone)]
pub struct SsvmRanker {
    pub config: SsvmConfig,
}

impl SurvivalRanker for SsvmRanker {
    fn name(&self) -> &'static str {
        "ssvm"
    }

    fn fit(&self, x: &Matrix, times: &[f64], events: &[bool], seed: u64) -> Result<Vec<f64>> {
        let config = SsvmConfig { seed, ..self.config.clone() };
        Ok(train_ssvm_scaled(x, times, events, &config)?.weights)
    }

    fn survival_scores(&self, weights: &[f64], x: &Matrix) -> Vec<f64> {
        x.mul_vec(weights)
    }
}
