//! Synthetic cohorts with a known sparse log-linear survival model.
//!
//! Latent event times follow `t = t0 · exp(-βᵀx + ε)` with `x` scaled onto `[0, 1]` by the
//! schema's generator ranges and `ε ~ N(0, noise²)`. Observed times are `min(t, C, horizon)`
//! with `C ~ U(0, c_max)` independent censoring. Positive coefficients shorten survival.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::cohort::{Cohort, SubjectRecord};
use super::schema::{CovariateKind, CovariateSchema};
use crate::math::dot;
use crate::{Error, Result};

pub const MIN_SYNTHETIC_SIZE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticGroundTruth {
    /// Coefficients over generator-scaled covariates; positive = higher hazard.
    pub beta_true: Vec<f64>,
    /// `t0` in months. Overwritten by calibration when `target_event_fraction` is set.
    pub baseline_time: f64,
    /// Administrative censoring time; `None` for unlimited follow-up.
    pub horizon: Option<f64>,
    pub noise_scale: f64,
    /// Upper end of the uniform censoring distribution; `None` disables it.
    pub uniform_censoring_max: Option<f64>,
    /// When set, `t0` is chosen so the realized event fraction is as close as possible.
    pub target_event_fraction: Option<f64>,
}

impl SyntheticGroundTruth {
    pub fn support(&self) -> Vec<usize> {
        (0..self.beta_true.len()).filter(|&k| self.beta_true[k] != 0.0).collect()
    }

    pub fn support_size(&self) -> usize {
        self.support().len()
    }

    /// Censored follow-up comparable to a 15-year study: 180-month horizon, uniform dropout,
    /// roughly one third of subjects with an event.
    pub fn with_beta(beta_true: Vec<f64>) -> Self {
        Self {
            beta_true,
            baseline_time: 100.0,
            horizon: Some(180.0),
            noise_scale: 0.5,
            uniform_censoring_max: Some(400.0),
            target_event_fraction: Some(0.35),
        }
    }

    fn validate(&self, arity: usize) -> Result<()> {
        if self.beta_true.len() != arity {
            return Err(Error::DimensionMismatch { expected: arity, found: self.beta_true.len() });
        }
        if self.support_size() == 0 {
            return Err(Error::InvalidConfig("beta_true must have a non-empty support".into()));
        }
        if self.beta_true.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig("beta_true must be finite".into()));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::InvalidConfig("noise scale must be finite and >= 0".into()));
        }
        if !(self.baseline_time > 0.0 && self.baseline_time.is_finite()) {
            return Err(Error::InvalidConfig("baseline time must be positive".into()));
        }
        if self.horizon.is_some_and(|h| !(h >= 0.0 && h.is_finite())) {
            return Err(Error::InvalidConfig("horizon must be finite and >= 0".into()));
        }
        if self.uniform_censoring_max.is_some_and(|c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidConfig("uniform censoring max must be positive".into()));
        }
        if self.target_event_fraction.is_some_and(|f| !(0.0..=1.0).contains(&f)) {
            return Err(Error::InvalidConfig("target event fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Sparse coefficient vector with `k` nonzero entries on clinically plausible columns when
/// they exist (mitosis, LVI, PgR, ...) with mixed signs, falling back to the first non-constant columns.
pub fn default_beta(schema: &CovariateSchema, k: usize) -> Result<Vec<f64>> {
    const PREFERRED: [(&str, f64); 8] = [
        ("M", 1.0),
        ("LVI", 0.8),
        ("PgR", -0.8),
        ("size", 0.8),
        ("age", -0.6),
        ("P", 0.6),
        ("DCIS", -0.5),
        ("multifocality", 0.5),
    ];
    let informative = |idx: usize| {
        let c = &schema.covariates()[idx];
        match c.kind {
            CovariateKind::Continuous => c.generator_range().0 < c.generator_range().1,
            CovariateKind::Binary => {
                schema.group_of(idx).is_some() || c.prevalence.is_none_or(|p| p > 0.0 && p < 1.0)
            }
        }
    };
    let mut beta = vec![0.0; schema.len()];
    let mut chosen = 0;
    for (name, value) in PREFERRED {
        if chosen == k {
            break;
        }
        if let Some(idx) = schema.index_of(name) {
            if informative(idx) {
                beta[idx] = value;
                chosen += 1;
            }
        }
    }
    let mut sign = 1.0;
    for idx in 0..schema.len() {
        if chosen == k {
            break;
        }
        if beta[idx] == 0.0 && informative(idx) {
            beta[idx] = 0.8 * sign;
            sign = -sign;
            chosen += 1;
        }
    }
    if chosen < k || k == 0 {
        return Err(Error::InvalidConfig(format!(
            "cannot place {k} nonzero coefficients on this schema"
        )));
    }
    Ok(beta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCohort {
    pub cohort: Cohort,
    /// The generating truth, with `baseline_time` as actually used.
    pub truth: SyntheticGroundTruth,
    pub event_fraction: f64,
}

fn draw_covariates(schema: &CovariateSchema, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = schema.len();
    let mut x = vec![0.0; d];
    let mut done = vec![false; d];
    for k in 0..d {
        if done[k] {
            continue;
        }
        if let Some(g) = schema.group_of(k) {
            let group = &schema.groups()[g];
            let m = group.members.len();
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (pos, &member) in group.members.iter().enumerate() {
                acc += group.prevalences.as_ref().map_or(1.0 / m as f64, |p| p[pos]);
                if u < acc {
                    x[member] = 1.0;
                    break;
                }
            }
            for &member in &group.members {
                done[member] = true;
            }
            continue;
        }
        let c = &schema.covariates()[k];
        x[k] = match c.kind {
            CovariateKind::Binary => {
                let p = c.prevalence.unwrap_or(0.5);
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            CovariateKind::Continuous => {
                let (lo, hi) = c.generator_range();
                if c.integer {
                    let (lo, hi) = (libm::ceil(lo) as i64, libm::floor(hi) as i64);
                    if hi > lo { rng.random_range(lo..=hi) as f64 } else { lo as f64 }
                } else if hi > lo {
                    rng.random_range(lo..hi)
                } else {
                    lo
                }
            }
        };
        done[k] = true;
    }
    x
}

fn scaled_by_generator(schema: &CovariateSchema, x: &[f64]) -> Vec<f64> {
    schema
        .covariates()
        .iter()
        .zip(x)
        .map(|(c, &v)| {
            let (lo, hi) = c.generator_range();
            if hi > lo { (v - lo) / (hi - lo) } else { 0.0 }
        })
        .collect()
}

/// Picks `ln t0` so that exactly `round(target · n)` subjects satisfy `ln t0 <= margin_i`.
fn calibrate_log_t0(margins: &[f64], target: f64) -> Option<f64> {
    let mut a: Vec<f64> = margins.to_vec();
    if a.iter().any(|v| v.is_nan()) {
        return None;
    }
    a.sort_by(|x, y| y.total_cmp(x));
    let n = a.len();
    let k = (libm::round(target * n as f64) as usize).min(n);
    let finite_max = a.iter().copied().find(|v| v.is_finite())?;
    let finite_min = a.iter().rev().copied().find(|v| v.is_finite())?;
    let threshold = if k == 0 {
        finite_max + 1.0
    } else if k == n {
        finite_min - 1.0
    } else {
        let (hi, lo) = (a[k - 1], a[k]);
        match (hi.is_finite(), lo.is_finite()) {
            (true, true) => 0.5 * (hi + lo),
            (true, false) => hi - 1.0,
            (false, true) => lo + 1.0,
            (false, false) => return None,
        }
    };
    Some(threshold)
}

pub fn generate_synthetic(
    n: usize,
    schema: &CovariateSchema,
    truth: &SyntheticGroundTruth,
    seed: u64,
) -> Result<SyntheticCohort> {
    if schema.is_empty() {
        return Err(Error::Schema("synthetic generation needs at least one covariate".into()));
    }
    if n < MIN_SYNTHETIC_SIZE {
        return Err(Error::InvalidConfig(format!(
            "synthetic cohorts need n >= {MIN_SYNTHETIC_SIZE}, got {n}"
        )));
    }
    truth.validate(schema.len())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(n);
    let mut log_hazard = Vec::with_capacity(n);
    let mut noise = Vec::with_capacity(n);
    let mut dropout = Vec::with_capacity(n);
    for _ in 0..n {
        let x = draw_covariates(schema, &mut rng);
        log_hazard.push(dot(&truth.beta_true, &scaled_by_generator(schema, &x)));
        xs.push(x);
        let z: f64 = rng.sample(StandardNormal);
        noise.push(truth.noise_scale * z);
        dropout.push(match truth.uniform_censoring_max {
            Some(c) => rng.random_range(0.0..c),
            None => f64::INFINITY,
        });
    }

    let cap: Vec<f64> = dropout.iter().map(|&c| truth.horizon.map_or(c, |h| c.min(h))).collect();
    let mut used = truth.clone();
    if let Some(target) = truth.target_event_fraction {
        if cap.iter().all(|c| c.is_finite()) && cap.iter().any(|&c| c > 0.0) {
            // Event iff t0 · exp(-η + ε) <= cap  ⇔  ln t0 <= ln cap + η - ε.
            let margins: Vec<f64> = (0..n)
                .map(|i| libm::log(cap[i]) + log_hazard[i] - noise[i])
                .collect();
            if let Some(log_t0) = calibrate_log_t0(&margins, target) {
                used.baseline_time = libm::exp(log_t0);
            }
        }
    }

    let mut records = Vec::with_capacity(n);
    let mut events = 0usize;
    for (i, x_raw) in xs.into_iter().enumerate() {
        let latent = used.baseline_time * libm::exp(-log_hazard[i] + noise[i]);
        let event = latent <= cap[i];
        let time = if event { latent } else { cap[i] };
        events += event as usize;
        records.push(SubjectRecord { id: format_id(i), x_raw, time, event });
    }
    let cohort = Cohort::new(schema.clone(), records)?;
    Ok(SyntheticCohort { cohort, truth: used, event_fraction: events as f64 / n as f64 })
}

fn format_id(i: usize) -> String {
    format!("S{:05}", i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::Covariate;

    fn uncensored(beta: Vec<f64>) -> SyntheticGroundTruth {
        SyntheticGroundTruth {
            beta_true: beta,
            baseline_time: 50.0,
            horizon: None,
            noise_scale: 0.0,
            uniform_censoring_max: None,
            target_event_fraction: None,
        }
    }

    #[test]
    fn noiseless_times_follow_linear_predictor() {
        let schema = CovariateSchema::clinicopathological();
        let beta = default_beta(&schema, 3).unwrap();
        let s = generate_synthetic(200, &schema, &uncensored(beta.clone()), 3).unwrap();
        assert_eq!(s.event_fraction, 1.0);
        let recs = s.cohort.records();
        for a in recs {
            for b in recs {
                let ea = dot(&beta, &scaled_by_generator(&schema, &a.x_raw));
                let eb = dot(&beta, &scaled_by_generator(&schema, &b.x_raw));
                if ea > eb {
                    assert!(a.time < b.time);
                }
            }
        }
    }

    #[test]
    fn zero_horizon_censors_everything_at_zero() {
        let schema = CovariateSchema::clinicopathological();
        let mut truth = SyntheticGroundTruth::with_beta(default_beta(&schema, 3).unwrap());
        truth.horizon = Some(0.0);
        let s = generate_synthetic(50, &schema, &truth, 1).unwrap();
        assert!(s.cohort.records().iter().all(|r| !r.event && r.time == 0.0));
    }

    #[test]
    fn event_fraction_hits_target() {
        let schema = CovariateSchema::clinicopathological();
        let truth = SyntheticGroundTruth::with_beta(default_beta(&schema, 3).unwrap());
        let s = generate_synthetic(1000, &schema, &truth, 11).unwrap();
        assert!((s.event_fraction - 0.35).abs() <= 0.1, "{}", s.event_fraction);
        assert_eq!(s.cohort.event_count(), 350);
    }

    #[test]
    fn one_hot_groups_are_exclusive() {
        let schema = CovariateSchema::clinicopathological();
        let truth = SyntheticGroundTruth::with_beta(default_beta(&schema, 3).unwrap());
        let s = generate_synthetic(500, &schema, &truth, 2).unwrap();
        let g = &schema.groups()[0];
        for r in s.cohort.records() {
            let active: f64 = g.members.iter().map(|&m| r.x_raw[m]).sum();
            assert!(active <= 1.0);
        }
    }

    #[test]
    fn same_seed_same_cohort() {
        let schema = CovariateSchema::clinicopathological();
        let truth = SyntheticGroundTruth::with_beta(default_beta(&schema, 3).unwrap());
        let a = generate_synthetic(100, &schema, &truth, 9).unwrap();
        let b = generate_synthetic(100, &schema, &truth, 9).unwrap();
        assert_eq!(a.cohort, b.cohort);
        assert_eq!(a.truth, b.truth);
    }

    #[test]
    fn rejects_small_n_and_empty_schema() {
        let schema = CovariateSchema::clinicopathological();
        let truth = SyntheticGroundTruth::with_beta(default_beta(&schema, 3).unwrap());
        assert!(matches!(generate_synthetic(5, &schema, &truth, 0), Err(Error::InvalidConfig(_))));
        let empty = CovariateSchema::new(vec![], vec![]).unwrap();
        assert!(matches!(generate_synthetic(20, &empty, &truth, 0), Err(Error::Schema(_))));
    }

    #[test]
    fn default_beta_skips_constant_columns() {
        let schema = CovariateSchema::new(
            vec![Covariate::continuous("c", 1.0, 1.0), Covariate::binary("b", 0.4)],
            vec![],
        )
        .unwrap();
        assert_eq!(default_beta(&schema, 1).unwrap(), vec![0.0, 0.8]);
        assert!(default_beta(&schema, 2).is_err());
    }
}
