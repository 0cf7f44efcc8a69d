use alloc::format;
use alloc::vec::Vec;

use super::chisq::chi_square_sf;
use crate::{Error, Result};

/// Right-censored outcomes of one group.
#[derive(Debug, Clone, Copy)]
pub struct Group<'a> {
    pub times: &'a [f64],
    pub events: &'a [bool],
}

impl<'a> Group<'a> {
    pub fn new(times: &'a [f64], events: &'a [bool]) -> Self {
        Self { times, events }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogRankResult {
    pub chi_square: f64,
    pub p_value: f64,
    /// Observed events in groups A and B.
    pub observed: [f64; 2],
    /// Expected events in groups A and B under equal hazards.
    pub expected: [f64; 2],
    pub variance: f64,
}

/// Unweighted two-group log-rank (Mantel-Haenszel) test with one degree of freedom.
pub fn logrank_test(a: Group<'_>, b: Group<'_>) -> Result<LogRankResult> {
    if a.times.is_empty() || b.times.is_empty() {
        return Err(Error::EmptyInput("log-rank needs records in both groups"));
    }
    for g in [a, b] {
        if g.times.len() != g.events.len() {
            return Err(Error::DimensionMismatch { expected: g.times.len(), found: g.events.len() });
        }
    }
    // (time, in_a, event), sorted by time.
    let mut all: Vec<(f64, bool, bool)> = a
        .times
        .iter()
        .zip(a.events)
        .map(|(&t, &e)| (t, true, e))
        .chain(b.times.iter().zip(b.events).map(|(&t, &e)| (t, false, e)))
        .collect();
    if !all.iter().any(|r| r.2) {
        return Err(Error::DegenerateTest("no events in either group".into()));
    }
    all.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut risk_a = a.times.len() as f64;
    let mut risk_b = b.times.len() as f64;
    let (mut obs_a, mut obs_b, mut exp_a, mut exp_b, mut var) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut pos = 0;
    while pos < all.len() {
        let t = all[pos].0;
        let (mut d_a, mut d_b, mut leave_a, mut leave_b) = (0.0, 0.0, 0.0, 0.0);
        while pos < all.len() && all[pos].0 == t {
            let (_, in_a, event) = all[pos];
            match (in_a, event) {
                (true, true) => d_a += 1.0,
                (false, true) => d_b += 1.0,
                _ => {}
            }
            if in_a {
                leave_a += 1.0;
            } else {
                leave_b += 1.0;
            }
            pos += 1;
        }
        let d = d_a + d_b;
        if d > 0.0 {
            let n = risk_a + risk_b;
            obs_a += d_a;
            obs_b += d_b;
            exp_a += risk_a * d / n;
            exp_b += risk_b * d / n;
            if n > 1.0 {
                var += risk_a * risk_b * d * (n - d) / (n * n * (n - 1.0));
            }
        }
        risk_a -= leave_a;
        risk_b -= leave_b;
    }
    if var <= 0.0 {
        return Err(Error::DegenerateTest(format!("zero log-rank variance ({obs_a} vs {obs_b} events)")));
    }
    // O_A - E_A = E_B - O_B; averaging both keeps the statistic exactly symmetric.
    let diff = ((obs_a - exp_a) - (obs_b - exp_b)) / 2.0;
    let chi_square = diff * diff / var;
    let p_value = chi_square_sf(chi_square, 1)?.max(f64::MIN_POSITIVE);
    Ok(LogRankResult { chi_square, p_value, observed: [obs_a, obs_b], expected: [exp_a, exp_b], variance: var })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_fixture() {
        let r = logrank_test(
            Group::new(&[1.0, 3.0], &[true, true]),
            Group::new(&[2.0, 4.0], &[true, true]),
        )
        .unwrap();
        assert_eq!(r.observed, [2.0, 2.0]);
        assert!((r.expected[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((r.variance - (0.25 + 2.0 / 9.0 + 0.25)).abs() < 1e-12);
        assert!((r.chi_square - 0.6154).abs() < 1e-4);
        assert!((r.p_value - 0.4328).abs() < 1e-4);
    }

    #[test]
    fn identical_groups() {
        let t = [1.0, 2.0, 3.0, 5.0];
        let e = [true, false, true, true];
        let r = logrank_test(Group::new(&t, &e), Group::new(&t, &e)).unwrap();
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn symmetric_in_groups() {
        let a = Group::new(&[1.0, 4.0, 6.0, 7.0], &[true, false, true, true]);
        let b = Group::new(&[2.0, 3.0, 9.0], &[true, true, false]);
        let ab = logrank_test(a, b).unwrap();
        let ba = logrank_test(b, a).unwrap();
        assert_eq!(ab.chi_square, ba.chi_square);
        assert_eq!(ab.p_value, ba.p_value);
        let total: f64 = ab.observed.iter().sum();
        assert!((total - ab.expected.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cases() {
        assert!(matches!(
            logrank_test(Group::new(&[1.0], &[true]), Group::new(&[], &[])),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            logrank_test(Group::new(&[1.0], &[false]), Group::new(&[2.0], &[false])),
            Err(Error::DegenerateTest(_))
        ));
        // A single event with only one subject at risk carries no variance.
        assert!(matches!(
            logrank_test(Group::new(&[1.0], &[false]), Group::new(&[2.0], &[true])),
            Err(Error::DegenerateTest(_))
        ));
    }
}
