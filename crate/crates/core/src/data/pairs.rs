use alloc::vec::Vec;

use super::cohort::Cohort;

/// Ordered comparable pairs `(i, j)`: subject `j` had the event and `T_i > T_j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSet {
    pub pairs: Vec<(usize, usize)>,
}

impl PairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.pairs.iter()
    }
}

/// All comparable pairs, sorted lexicographically by `(i, j)`. Tied times give no pair.
pub fn comparable_pairs_from(times: &[f64], events: &[bool]) -> PairSet {
    assert_eq!(times.len(), events.len());
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut pairs = Vec::new();
    let mut start = 0;
    // `later` = first position whose time is strictly greater than the current time.
    let mut later = 0;
    while start < order.len() {
        let t = times[order[start]];
        let mut end = start;
        while end < order.len() && times[order[end]] == t {
            end += 1;
        }
        later = later.max(end);
        for &j in &order[start..end] {
            if events[j] {
                pairs.extend(order[later..].iter().map(|&i| (i, j)));
            }
        }
        start = end;
    }
    pairs.sort_unstable();
    PairSet { pairs }
}

pub fn comparable_pairs(cohort: &Cohort) -> PairSet {
    comparable_pairs_from(&cohort.times(), &cohort.events())
}

/// `|P|` without materializing the pairs.
pub fn count_comparable_pairs(times: &[f64], events: &[bool]) -> usize {
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    times
        .iter()
        .zip(events)
        .filter(|(_, &e)| e)
        .map(|(&t, _)| sorted.len() - sorted.partition_point(|&v| v <= t))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_record_example() {
        // r1=(5,1), r2=(3,0), r3=(7,1), r4=(3,1), zero-based.
        let times = [5.0, 3.0, 7.0, 3.0];
        let events = [true, false, true, true];
        let p = comparable_pairs_from(&times, &events);
        let mut expected = alloc::vec![(2, 0), (0, 3), (2, 3)];
        expected.sort_unstable();
        assert_eq!(p.pairs, expected);
        assert_eq!(count_comparable_pairs(&times, &events), 3);
    }

    #[test]
    fn all_censored_gives_nothing() {
        let p = comparable_pairs_from(&[1.0, 2.0, 3.0], &[false, false, false]);
        assert!(p.is_empty());
    }

    #[test]
    fn tied_events_give_nothing() {
        let p = comparable_pairs_from(&[4.0, 4.0], &[true, true]);
        assert!(p.is_empty());
    }
}
