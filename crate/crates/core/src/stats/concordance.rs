use alloc::vec::Vec;

use crate::sweep::Fenwick;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConcordanceResult {
    pub c_index: f64,
    pub concordant: u64,
    pub discordant: u64,
    pub tied: u64,
}

impl ConcordanceResult {
    pub fn pairs(&self) -> u64 {
        self.concordant + self.discordant + self.tied
    }
}

/// Harrell's C for survival scores (higher score = longer predicted survival). Over
/// comparable pairs `T_i > T_j, δ_j = 1` a pair is concordant when `s_i > s_j`; tied
/// scores earn half credit.
pub fn concordance_index(scores: &[f64], times: &[f64], events: &[bool]) -> Result<ConcordanceResult> {
    let n = scores.len();
    if times.len() != n || events.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: times.len().min(events.len()) });
    }
    let mut values: Vec<f64> = scores.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let rank = |s: f64| values.partition_point(|&v| v < s);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| times[b].total_cmp(&times[a]));

    let mut tree = Fenwick::<1>::new(values.len());
    let (mut concordant, mut discordant, mut tied) = (0.0, 0.0, 0.0);
    let mut pos = 0;
    while pos < n {
        let t = times[order[pos]];
        let mut end = pos;
        while end < n && times[order[end]] == t {
            end += 1;
        }
        for &j in &order[pos..end] {
            if events[j] {
                let r = rank(scores[j]);
                let below = tree.prefix(r)[0];
                let through = tree.prefix(r + 1)[0];
                discordant += below;
                tied += through - below;
                concordant += tree.total()[0] - through;
            }
        }
        for &i in &order[pos..end] {
            tree.add(rank(scores[i]), [1.0]);
        }
        pos = end;
    }
    let total = concordant + discordant + tied;
    if total == 0.0 {
        return Err(Error::NoComparablePairs);
    }
    Ok(ConcordanceResult {
        c_index: (concordant + 0.5 * tied) / total,
        concordant: concordant as u64,
        discordant: discordant as u64,
        tied: tied as u64,
    })
}

/// C-index for risk scores (higher = shorter predicted survival).
pub fn risk_concordance(risk_scores: &[f64], times: &[f64], events: &[bool]) -> Result<ConcordanceResult> {
    let negated: Vec<f64> = risk_scores.iter().map(|r| -r).collect();
    concordance_index(&negated, times, events)
}
