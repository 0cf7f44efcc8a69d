//! Aggregates over comparable pairs in `O(n log n)`.
//!
//! Pairwise losses only need, for every subject, how many of its comparable partners are
//! inside the hinge and the sum of their scores. Sweeping subjects in time order while a
//! Fenwick tree indexed by score rank holds the other side of each pair gives those sums
//! without enumerating the `O(n²)` pairs.

use alloc::vec;
use alloc::vec::Vec;

/// Fenwick tree over `K` parallel accumulators.
pub(crate) struct Fenwick<const K: usize> {
    tree: Vec<[f64; K]>,
    total: [f64; K],
}

impl<const K: usize> Fenwick<K> {
    pub fn new(n: usize) -> Self {
        Self { tree: vec![[0.0; K]; n + 1], total: [0.0; K] }
    }

    pub fn add(&mut self, pos: usize, value: [f64; K]) {
        for k in 0..K {
            self.total[k] += value[k];
        }
        let mut i = pos + 1;
        while i < self.tree.len() {
            for k in 0..K {
                self.tree[i][k] += value[k];
            }
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `0..end`.
    pub fn prefix(&self, end: usize) -> [f64; K] {
        let mut acc = [0.0; K];
        let mut i = end;
        while i > 0 {
            for k in 0..K {
                acc[k] += self.tree[i][k];
            }
            i &= i - 1;
        }
        acc
    }

    pub fn total(&self) -> [f64; K] {
        self.total
    }
}

/// Time ordering of a cohort, grouped into runs of equal time.
#[derive(Debug, Clone)]
pub(crate) struct PairSweep {
    by_time: Vec<usize>,
    groups: Vec<(usize, usize)>,
    events: Vec<bool>,
    n_pairs: usize,
}

/// Per-subject sums over active pairs, where a pair `(i, j)` is active when
/// `s_i - s_j < margin`.
#[derive(Debug, Clone)]
pub(crate) struct ActiveStats {
    /// Subject as the shorter-time event `j`: partner count, `Σ s_i`, `Σ s_i²`.
    pub as_short: Vec<[f64; 3]>,
    /// Subject as the longer-time member `i`: partner count, `Σ s_j`.
    pub as_long: Vec<[f64; 2]>,
}

impl PairSweep {
    pub fn new(times: &[f64], events: &[bool]) -> Self {
        assert_eq!(times.len(), events.len());
        let mut by_time: Vec<usize> = (0..times.len()).collect();
        by_time.sort_by(|&a, &b| times[a].total_cmp(&times[b]).then(a.cmp(&b)));
        let mut groups = Vec::new();
        let mut start = 0;
        while start < by_time.len() {
            let t = times[by_time[start]];
            let mut end = start + 1;
            while end < by_time.len() && times[by_time[end]] == t {
                end += 1;
            }
            groups.push((start, end));
            start = end;
        }
        let n = times.len();
        let n_pairs = groups
            .iter()
            .map(|&(s, e)| by_time[s..e].iter().filter(|&&j| events[j]).count() * (n - e))
            .sum();
        Self { by_time, groups, events: events.to_vec(), n_pairs }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn active(&self, scores: &[f64], margin: f64) -> ActiveStats {
        let n = self.len();
        assert_eq!(scores.len(), n);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let mut rank = vec![0usize; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let sorted: Vec<f64> = order.iter().map(|&i| scores[i]).collect();

        let mut as_short = vec![[0.0; 3]; n];
        let mut longer = Fenwick::<3>::new(n);
        for &(s, e) in self.groups.iter().rev() {
            for &j in &self.by_time[s..e] {
                if self.events[j] {
                    let sj = scores[j];
                    let cut = sorted.partition_point(|&v| v - sj < margin);
                    as_short[j] = longer.prefix(cut);
                }
            }
            for &i in &self.by_time[s..e] {
                let si = scores[i];
                longer.add(rank[i], [1.0, si, si * si]);
            }
        }

        let mut as_long = vec![[0.0; 2]; n];
        let mut shorter = Fenwick::<2>::new(n);
        for &(s, e) in &self.groups {
            for &i in &self.by_time[s..e] {
                let si = scores[i];
                let cut = sorted.partition_point(|&v| !(si - v < margin));
                let below = shorter.prefix(cut);
                let total = shorter.total();
                as_long[i] = [total[0] - below[0], total[1] - below[1]];
            }
            for &j in &self.by_time[s..e] {
                if self.events[j] {
                    shorter.add(rank[j], [1.0, scores[j]]);
                }
            }
        }
        ActiveStats { as_short, as_long }
    }

    /// Uniform sampler over the comparable pairs.
    pub fn sampler(&self) -> PairSampler<'_> {
        let n = self.len();
        let mut cumulative = Vec::new();
        let mut short = Vec::new();
        let mut suffix = Vec::new();
        let mut acc = 0usize;
        for &(s, e) in &self.groups {
            for &j in &self.by_time[s..e] {
                if self.events[j] && e < n {
                    acc += n - e;
                    cumulative.push(acc);
                    short.push(j);
                    suffix.push(e);
                }
            }
        }
        PairSampler { sweep: self, cumulative, short, suffix }
    }
}

pub(crate) struct PairSampler<'a> {
    sweep: &'a PairSweep,
    cumulative: Vec<usize>,
    short: Vec<usize>,
    suffix: Vec<usize>,
}

impl PairSampler<'_> {
    /// Maps `u ∈ [0, |P|)` to a distinct pair `(i, j)`.
    pub fn pair(&self, u: usize) -> (usize, usize) {
        let slot = self.cumulative.partition_point(|&c| c <= u);
        let before = if slot == 0 { 0 } else { self.cumulative[slot - 1] };
        let i = self.sweep.by_time[self.suffix[slot] + (u - before)];
        (i, self.short[slot])
    }
}
