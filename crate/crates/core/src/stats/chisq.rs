use alloc::format;

use crate::{Error, Result};

/// Upper tail `P(X > x)` of a chi-square distribution.
///
/// Only one degree of freedom is supported, where the tail equals `erfc(sqrt(x / 2))`.
pub fn chi_square_sf(x: f64, df: u32) -> Result<f64> {
    if df != 1 {
        return Err(Error::InvalidConfig(format!("chi-square tail implemented for 1 df, got {df}")));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidConfig(format!("chi-square statistic must be >= 0, got {x}")));
    }
    Ok(libm::erfc(libm::sqrt(0.5 * x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors() {
        assert_eq!(chi_square_sf(0.0, 1).unwrap(), 1.0);
        assert!((chi_square_sf(3.841459, 1).unwrap() - 0.05).abs() < 1e-6);
        assert!((chi_square_sf(0.6154, 1).unwrap() - 0.4328).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(chi_square_sf(-1.0, 1).is_err());
        assert!(chi_square_sf(f64::NAN, 1).is_err());
        assert!(chi_square_sf(1.0, 2).is_err());
    }
}
