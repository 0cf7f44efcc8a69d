use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cohort::Cohort;
use crate::{Error, Result};

/// Row indices of a discovery/validation partition, each in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitIndices {
    pub discovery: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Number of stratum members sent to discovery: nearest integer, with at least one member
/// on each side when `keep_both` is set and the stratum has two or more members.
fn discovery_count(total: usize, fraction: f64, keep_both: bool) -> usize {
    let n = libm::round(fraction * total as f64) as usize;
    let n = n.min(total);
    if keep_both && total >= 2 {
        n.clamp(1, total - 1)
    } else {
        n
    }
}

/// Event-stratified random partition. Events and censored cases are shuffled and split
/// independently so both sides keep the cohort's event proportion.
pub fn split_indices(events: &[bool], fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidConfig("discovery fraction must lie in (0, 1)".into()));
    }
    let mut with_event: Vec<usize> = (0..events.len()).filter(|&i| events[i]).collect();
    let mut censored: Vec<usize> = (0..events.len()).filter(|&i| !events[i]).collect();
    if with_event.len() < 2 {
        return Err(Error::InsufficientEvents { needed: 2, found: with_event.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    with_event.shuffle(&mut rng);
    censored.shuffle(&mut rng);

    let ne = discovery_count(with_event.len(), fraction, true);
    let nc = discovery_count(censored.len(), fraction, false);
    let mut discovery: Vec<usize> = with_event[..ne].iter().chain(&censored[..nc]).copied().collect();
    let mut validation: Vec<usize> = with_event[ne..].iter().chain(&censored[nc..]).copied().collect();
    discovery.sort_unstable();
    validation.sort_unstable();
    Ok(SplitIndices { discovery, validation })
}

pub fn stratified_split(cohort: &Cohort, fraction: f64, seed: u64) -> Result<(Cohort, Cohort)> {
    let s = split_indices(&cohort.events(), fraction, seed)?;
    Ok((cohort.subset(&s.discovery), cohort.subset(&s.validation)))
}
