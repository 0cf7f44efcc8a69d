use crate::math::dot;
use crate::{Error, Result};

/// `σ(z) = (1 - e^{-z}) / (1 + e^{-z})`, evaluated as `tanh(z / 2)` so it stays finite for
/// any finite `z`.
pub fn bipolar_sigmoid(z: f64) -> f64 {
    libm::tanh(0.5 * z)
}

/// `σ'(z) = (1 - σ(z)²) / 2`.
pub fn bipolar_sigmoid_derivative(z: f64) -> f64 {
    let s = bipolar_sigmoid(z);
    0.5 * (1.0 - s * s)
}

/// Survival score `σ(wᵀx)`; higher means longer predicted survival.
pub fn score(w: &[f64], x: &[f64]) -> Result<f64> {
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), found: x.len() });
    }
    Ok(bipolar_sigmoid(dot(w, x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        assert_eq!(bipolar_sigmoid(0.0), 0.0);
        let e = libm::exp(-2.0);
        let hand = (1.0 - e) / (1.0 + e);
        assert!((bipolar_sigmoid(2.0) - hand).abs() < 1e-15);
        assert!((bipolar_sigmoid(2.0) - 0.761594).abs() < 1e-6);
        for z in [0.3, 1.7, 5.0, 40.0, 800.0] {
            assert_eq!(bipolar_sigmoid(-z), -bipolar_sigmoid(z));
        }
        assert_eq!(bipolar_sigmoid(800.0), 1.0);
        assert!(bipolar_sigmoid(-800.0).is_finite());
    }

    #[test]
    fn derivative_at_zero_is_half() {
        assert_eq!(bipolar_sigmoid_derivative(0.0), 0.5);
        let h = 1e-6;
        let fd = (bipolar_sigmoid(0.7 + h) - bipolar_sigmoid(0.7 - h)) / (2.0 * h);
        assert!((fd - bipolar_sigmoid_derivative(0.7)).abs() < 1e-9);
    }

    #[test]
    fn score_cases() {
        assert_eq!(score(&[0.0, 0.0], &[3.0, -1.0]).unwrap(), 0.0);
        assert!((score(&[2.0, 0.0], &[1.0, 0.0]).unwrap() - 0.761594).abs() < 1e-6);
        assert_eq!(score(&[2.0, 0.0], &[1.0, 5.0]), score(&[2.0, 0.0], &[1.0, -9.0]));
        assert!(matches!(score(&[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }
}
