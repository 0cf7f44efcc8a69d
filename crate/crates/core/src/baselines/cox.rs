//! L1-regularized Cox proportional hazards fitted by proximal gradient.

use alloc::vec;
use alloc::vec::Vec;

use crate::bootstrap::SurvivalRanker;
use crate::data::{Cohort, ScalingParams};
use crate::math::{l1_norm, Matrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CoxL1Config {
    pub l1_weight: f64,
    /// Initial proximal step; halved by backtracking as needed.
    pub step_size: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for CoxL1Config {
    fn default() -> Self {
        Self { l1_weight: 0.05, step_size: 1.0, max_iterations: 1000, tolerance: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoxModel {
    pub coefficients: Vec<f64>,
    pub hazard_ratios: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// `false` when the iteration budget ran out; the best iterate is still returned.
    pub converged: bool,
}

/// Negative Breslow partial log-likelihood and its gradient.
pub fn cox_nll_and_gradient(w: &[f64], x: &Matrix, times: &[f64], events: &[bool]) -> Result<(f64, Vec<f64>)> {
    let n = x.rows();
    if w.len() != x.cols() {
        return Err(Error::DimensionMismatch { expected: x.cols(), found: w.len() });
    }
    if times.len() != n || events.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: times.len() });
    }
    if !events.iter().any(|&e| e) {
        return Err(Error::InsufficientEvents { needed: 1, found: 0 });
    }
    let eta = x.mul_vec(w);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| times[b].total_cmp(&times[a]));

    let d = x.cols();
    // Risk-set sums Σ e^{η - m} and Σ x e^{η - m} with a running maximum m.
    let mut m = f64::NEG_INFINITY;
    let mut s = 0.0;
    let mut sx = vec![0.0; d];
    let mut nll = 0.0;
    let mut grad = vec![0.0; d];
    let mut pos = 0;
    while pos < n {
        let t = times[order[pos]];
        let mut end = pos;
        while end < n && times[order[end]] == t {
            let k = order[end];
            if eta[k] > m {
                let r = libm::exp(m - eta[k]);
                s *= r;
                sx.iter_mut().for_each(|v| *v *= r);
                m = eta[k];
            }
            let e = libm::exp(eta[k] - m);
            s += e;
            for (acc, &xv) in sx.iter_mut().zip(x.row(k)) {
                *acc += e * xv;
            }
            end += 1;
        }
        let log_sum = m + libm::log(s);
        for &i in &order[pos..end] {
            if events[i] {
                nll -= eta[i] - log_sum;
                for (g, (&xi, &acc)) in grad.iter_mut().zip(x.row(i).iter().zip(&sx)) {
                    *g -= xi - acc / s;
                }
            }
        }
        pos = end;
    }
    Ok((nll, grad))
}

pub fn cox_nll(w: &[f64], x: &Matrix, times: &[f64], events: &[bool]) -> Result<f64> {
    cox_nll_and_gradient(w, x, times, events).map(|r| r.0)
}

/// Proximal operator of `t ‖·‖₁`.
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Minimizes `cox_nll / n_events + λ ‖w‖₁` from `w = 0` with backtracking proximal gradient.
pub fn train_cox_l1_scaled(x: &Matrix, times: &[f64], events: &[bool], config: &CoxL1Config) -> Result<CoxModel> {
    if !(config.l1_weight >= 0.0 && config.l1_weight.is_finite()) {
        return Err(Error::InvalidConfig("Cox L1 weight must be finite and >= 0".into()));
    }
    if !(config.step_size > 0.0) || config.max_iterations == 0 {
        return Err(Error::InvalidConfig("Cox step size and iterations must be positive".into()));
    }
    let n_events = events.iter().filter(|&&e| e).count();
    if n_events < 2 {
        return Err(Error::InsufficientEvents { needed: 2, found: n_events });
    }
    let scale = 1.0 / n_events as f64;
    let smooth = |w: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (v, mut g) = cox_nll_and_gradient(w, x, times, events)?;
        g.iter_mut().for_each(|gi| *gi *= scale);
        Ok((v * scale, g))
    };
    let lambda = config.l1_weight;
    let mut w = vec![0.0; x.cols()];
    let (mut f, mut grad) = smooth(&w)?;
    let mut objective = f;
    let mut step = config.step_size;
    let mut converged = false;
    let mut iterations = 0;
    'outer: while iterations < config.max_iterations {
        iterations += 1;
        loop {
            let cand: Vec<f64> = w
                .iter()
                .zip(&grad)
                .map(|(&wi, &gi)| soft_threshold(wi - step * gi, step * lambda))
                .collect();
            let (fc, gc) = smooth(&cand)?;
            let diff: Vec<f64> = cand.iter().zip(&w).map(|(a, b)| a - b).collect();
            let linear: f64 = diff.iter().zip(&grad).map(|(d, g)| d * g).sum();
            let quad: f64 = diff.iter().map(|d| d * d).sum::<f64>() / (2.0 * step);
            if fc <= f + linear + quad + 1e-15 {
                let cand_objective = fc + lambda * l1_norm(&cand);
                let change = objective - cand_objective;
                w = cand;
                f = fc;
                grad = gc;
                if cand_objective <= objective {
                    objective = cand_objective;
                }
                if change.abs() < config.tolerance {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                converged = true;
                break 'outer;
            }
        }
    }
    let objective = f + lambda * l1_norm(&w);
    Ok(CoxModel {
        hazard_ratios: w.iter().map(|&b| libm::exp(b)).collect(),
        coefficients: w,
        objective,
        iterations,
        converged,
    })
}

/// Fits range scaling on `discovery` and trains on the scaled covariates.
pub fn train_cox_l1(discovery: &Cohort, config: &CoxL1Config) -> Result<CoxModel> {
    let raw = discovery.raw_matrix();
    let x = ScalingParams::fit(&raw).apply(&raw)?;
    train_cox_l1_scaled(&x, &discovery.times(), &discovery.events(), config)
}

/// Cox as a ranker: higher `wᵀx` is higher hazard, so the survival score is `-wᵀx`.
#[derive(Debug, Clone)]
pub struct CoxRanker {
    pub config: CoxL1Config,
}

impl SurvivalRanker for CoxRanker {
    fn name(&self) -> &'static str {
        "cox_l1"
    }

    fn fit(&self, x: &Matrix, times: &[f64], events: &[bool], _seed: u64) -> Result<Vec<f64>> {
        Ok(train_cox_l1_scaled(x, times, events, &self.config)?.coefficients)
    }

    fn survival_scores(&self, weights: &[f64], x: &Matrix) -> Vec<f64> {
        x.mul_vec(weights).into_iter().map(|v| -v).collect()
    }

    fn orientation(&self) -> f64 {
        -1.0
    }
}
