//! Ranking objective `Q(w) = λ‖w‖₁ + mean over comparable pairs of max(0, 1 - (f_i - f_j))`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::scorer::{bipolar_sigmoid, bipolar_sigmoid_derivative};
use crate::data::PairSet;
use crate::math::{l1_norm, sign, Matrix};
use crate::sweep::PairSweep;
use crate::{Error, Result};

fn check(w: &[f64], x: &Matrix, pairs: &PairSet) -> Result<()> {
    if w.len() != x.cols() {
        return Err(Error::DimensionMismatch { expected: x.cols(), found: w.len() });
    }
    if pairs.is_empty() {
        return Err(Error::NoComparablePairs);
    }
    Ok(())
}

/// Objective over an explicit pair set.
pub fn objective(w: &[f64], x: &Matrix, pairs: &PairSet, lambda: f64) -> Result<f64> {
    check(w, x, pairs)?;
    let f: Vec<f64> = x.mul_vec(w).into_iter().map(bipolar_sigmoid).collect();
    let hinge: f64 = pairs.iter().map(|&(i, j)| (1.0 - (f[i] - f[j])).max(0.0)).sum();
    Ok(lambda * l1_norm(w) + hinge / pairs.len() as f64)
}

/// Subgradient of [`objective`], using `sign(0) = 0` for the L1 term and zero slope at the
/// hinge kink.
pub fn objective_gradient(w: &[f64], x: &Matrix, pairs: &PairSet, lambda: f64) -> Result<Vec<f64>> {
    check(w, x, pairs)?;
    let z = x.mul_vec(w);
    let f: Vec<f64> = z.iter().map(|&v| bipolar_sigmoid(v)).collect();
    let mut coef = vec![0.0; x.rows()];
    for &(i, j) in pairs.iter() {
        if 1.0 - (f[i] - f[j]) > 0.0 {
            coef[i] -= bipolar_sigmoid_derivative(z[i]);
            coef[j] += bipolar_sigmoid_derivative(z[j]);
        }
    }
    let scale = 1.0 / pairs.len() as f64;
    coef.iter_mut().for_each(|c| *c *= scale);
    let mut grad: Vec<f64> = w.iter().map(|&v| lambda * sign(v)).collect();
    x.add_transpose_mul(&coef, &mut grad);
    Ok(grad)
}

/// The same objective evaluated by an `O(n log n)` sweep instead of a pair loop.
#[derive(Debug, Clone)]
pub struct PairwiseHinge<'a> {
    x: &'a Matrix,
    sweep: PairSweep,
}

impl<'a> PairwiseHinge<'a> {
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

    pub fn n_pairs(&self) -> usize {
        self.sweep.n_pairs()
    }

    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    /// Objective and subgradient. `penalized` marks which weights carry the L1 term.
    pub fn evaluate(&self, w: &[f64], lambda: f64, penalized: usize) -> (f64, Vec<f64>) {
        let z = self.x.mul_vec(w);
        let f: Vec<f64> = z.iter().map(|&v| bipolar_sigmoid(v)).collect();
        let stats = self.sweep.active(&f, 1.0);
        let mut hinge = 0.0;
        let mut coef = vec![0.0; z.len()];
        for k in 0..z.len() {
            let [count_short, sum_longer, _] = stats.as_short[k];
            hinge += count_short * (1.0 + f[k]) - sum_longer;
            coef[k] = (count_short - stats.as_long[k][0]) * 0.5 * (1.0 - f[k] * f[k]);
        }
        let scale = 1.0 / self.n_pairs() as f64;
        coef.iter_mut().for_each(|c| *c *= scale);
        let (value, mut grad) = penalty(w, lambda, penalized);
        self.x.add_transpose_mul(&coef, &mut grad);
        (value + hinge * scale, grad)
    }

    /// Subgradient over `samples` pairs drawn uniformly with replacement.
    pub fn sampled_gradient<R: Rng>(
        &self,
        w: &[f64],
        lambda: f64,
        penalized: usize,
        samples: usize,
        rng: &mut R,
    ) -> Vec<f64> {
        let z = self.x.mul_vec(w);
        let f: Vec<f64> = z.iter().map(|&v| bipolar_sigmoid(v)).collect();
        let sampler = self.sweep.sampler();
        let mut coef = vec![0.0; z.len()];
        for _ in 0..samples {
            let (i, j) = sampler.pair(rng.random_range(0..self.n_pairs()));
            if f[i] - f[j] < 1.0 {
                coef[i] -= 0.5 * (1.0 - f[i] * f[i]);
                coef[j] += 0.5 * (1.0 - f[j] * f[j]);
            }
        }
        let scale = 1.0 / samples.max(1) as f64;
        coef.iter_mut().for_each(|c| *c *= scale);
        let (_, mut grad) = penalty(w, lambda, penalized);
        self.x.add_transpose_mul(&coef, &mut grad);
        grad
    }
}

fn penalty(w: &[f64], lambda: f64, penalized: usize) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; w.len()];
    let mut value = 0.0;
    for k in 0..penalized.min(w.len()) {
        value += lambda * w[k].abs();
        grad[k] = lambda * sign(w[k]);
    }
    (value, grad)
}
