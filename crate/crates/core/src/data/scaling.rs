use alloc::vec::Vec;

use super::cohort::Cohort;
use crate::math::Matrix;
use crate::{Error, Result};

/// Per-covariate extremes of the fitting cohort, used to map raw values onto `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingParams {
    pub fn fit(x: &Matrix) -> Self {
        let d = x.cols();
        let mut min = alloc::vec![f64::INFINITY; d];
        let mut max = alloc::vec![f64::NEG_INFINITY; d];
        for i in 0..x.rows() {
            for (k, &v) in x.row(i).iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        if x.rows() == 0 {
            min.fill(0.0);
            max.fill(0.0);
        }
        Self { min, max }
    }

    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    pub fn range(&self, k: usize) -> f64 {
        self.max[k] - self.min[k]
    }

    pub fn is_constant(&self, k: usize) -> bool {
        self.max[k] == self.min[k]
    }

    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.is_constant(k)).collect()
    }

    /// Scales one raw value. Constant covariates map to 0; no clipping.
    pub fn scale_value(&self, k: usize, raw: f64) -> f64 {
        if self.is_constant(k) {
            0.0
        } else {
            (raw - self.min[k]) / self.range(k)
        }
    }

    pub fn unscale_value(&self, k: usize, scaled: f64) -> f64 {
        if self.is_constant(k) {
            self.min[k]
        } else {
            scaled * self.range(k) + self.min[k]
        }
    }

    pub fn apply_row(&self, raw: &[f64], out: &mut [f64]) -> Result<()> {
        if raw.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: raw.len() });
        }
        for (k, (o, &v)) in out.iter_mut().zip(raw).enumerate() {
            *o = self.scale_value(k, v);
        }
        Ok(())
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: x.cols() });
        }
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for i in 0..x.rows() {
            self.apply_row(x.row(i), out.row_mut(i))?;
        }
        Ok(out)
    }

    pub fn invert_row(&self, scaled: &[f64]) -> Vec<f64> {
        scaled.iter().enumerate().map(|(k, &v)| self.unscale_value(k, v)).collect()
    }
}

pub fn fit_scaling(cohort: &Cohort) -> ScalingParams {
    ScalingParams::fit(&cohort.raw_matrix())
}

pub fn apply_scaling(params: &ScalingParams, cohort: &Cohort) -> Result<Matrix> {
    params.apply(&cohort.raw_matrix())
}
