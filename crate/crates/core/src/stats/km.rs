use alloc::vec::Vec;

use crate::{Error, Result};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Product-limit survival curve, one entry per distinct event time.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KmCurve {
    /// Number of subjects at time zero.
    pub n: usize,
    pub event_times: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
    pub survival: Vec<f64>,
    pub ci_lower: Vec<f64>,
    pub ci_upper: Vec<f64>,
}

impl KmCurve {
    /// `S(t)` as a right-continuous step function.
    pub fn survival_at(&self, t: f64) -> f64 {
        let k = self.event_times.partition_point(|&e| e <= t);
        if k == 0 { 1.0 } else { self.survival[k - 1] }
    }
}

/// Kaplan-Meier estimate with a Greenwood 95% band on the survival scale, clipped to `[0, 1]`.
///
/// At a tied time events are counted before censorings, so subjects censored at `t`
/// are still at risk at `t`.
pub fn km_estimate(times: &[f64], events: &[bool]) -> Result<KmCurve> {
    if times.is_empty() {
        return Err(Error::EmptyInput("Kaplan-Meier needs at least one record"));
    }
    if times.len() != events.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: events.len() });
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let n = times.len();
    let mut curve = KmCurve {
        n,
        event_times: Vec::new(),
        at_risk: Vec::new(),
        events: Vec::new(),
        survival: Vec::new(),
        ci_lower: Vec::new(),
        ci_upper: Vec::new(),
    };
    // Between censorings the product telescopes: S = anchor_s · (survivors / anchor_n).
    let mut anchor_s = 1.0;
    let mut anchor_n = n;
    let mut expected_next = n;
    let mut s = 1.0;
    let mut greenwood = 0.0;
    let mut exhausted = false;
    let mut removed = 0;
    let mut pos = 0;
    while pos < n {
        let t = times[order[pos]];
        let mut end = pos;
        let mut d = 0;
        while end < n && times[order[end]] == t {
            d += events[order[end]] as usize;
            end += 1;
        }
        let at_risk = n - removed;
        if d > 0 {
            if at_risk != expected_next {
                anchor_s = s;
                anchor_n = at_risk;
            }
            s = anchor_s * (at_risk - d) as f64 / anchor_n as f64;
            expected_next = at_risk - d;
            if at_risk == d {
                exhausted = true;
            } else {
                greenwood += d as f64 / (at_risk as f64 * (at_risk - d) as f64);
            }
            let (lo, hi) = if exhausted {
                (0.0, 0.0)
            } else {
                let half = Z_95 * s * libm::sqrt(greenwood);
                ((s - half).clamp(0.0, 1.0), (s + half).clamp(0.0, 1.0))
            };
            curve.event_times.push(t);
            curve.at_risk.push(at_risk);
            curve.events.push(d);
            curve.survival.push(s);
            curve.ci_lower.push(lo.min(s));
            curve.ci_upper.push(hi.max(s));
        }
        removed += end - pos;
        pos = end;
    }
    Ok(curve)
}
