//! Independent reference implementations and random instances shared by test targets.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer-valued times on a small grid, so ties are frequent, with random censoring.
pub fn random_outcomes(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<bool>) {
    let grid = rng.random_range(2..=(n as u32).max(3));
    let censor_rate: f64 = rng.random_range(0.0..0.8);
    let times = (0..n).map(|_| rng.random_range(0..grid) as f64).collect();
    let events = (0..n).map(|_| !rng.random_bool(censor_rate)).collect();
    (times, events)
}

/// Scores with deliberate ties.
pub fn random_scores(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let levels = rng.random_range(1..=n.max(1) as u32);
    (0..n).map(|_| rng.random_range(0..levels) as f64 * 0.25 - 1.0).collect()
}

pub fn brute_pairs(times: &[f64], events: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..times.len() {
        for j in 0..times.len() {
            if events[j] && times[i] > times[j] {
                out.push((i, j));
            }
        }
    }
    out
}

/// (concordant, discordant, tied) over comparable pairs, by direct enumeration.
pub fn brute_concordance(scores: &[f64], times: &[f64], events: &[bool]) -> (u64, u64, u64) {
    let (mut c, mut d, mut t) = (0, 0, 0);
    for (i, j) in brute_pairs(times, events) {
        if scores[i] > scores[j] {
            c += 1;
        } else if scores[i] < scores[j] {
            d += 1;
        } else {
            t += 1;
        }
    }
    (c, d, t)
}

fn ln_gamma_half() -> f64 {
    0.5 * std::f64::consts::PI.ln()
}

/// Regularized upper incomplete gamma `Q(a, x)` via the series for `x < a + 1` and a
/// Lentz continued fraction otherwise.
pub fn upper_gamma_q(a: f64, x: f64, ln_gamma_a: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let prefactor = (-x + a * x.ln() - ln_gamma_a).exp();
    if x < a + 1.0 {
        let (mut term, mut sum, mut ap) = (1.0 / a, 1.0 / a, a);
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * prefactor
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        prefactor * h
    }
}

/// `P(χ²₁ > x)`.
pub fn chi_square_1_tail(x: f64) -> f64 {
    upper_gamma_q(0.5, x / 2.0, ln_gamma_half())
}

/// Two-group log-rank statistic from its textbook definition, summing over distinct event
/// times with hypergeometric variance.
pub fn logrank_reference(ta: &[f64], ea: &[bool], tb: &[f64], eb: &[bool]) -> (f64, f64) {
    let mut times: Vec<f64> = ta
        .iter()
        .zip(ea)
        .chain(tb.iter().zip(eb))
        .filter(|(_, &e)| e)
        .map(|(&t, _)| t)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (mut o_minus_e, mut var) = (0.0, 0.0);
    for t in times {
        let n1 = ta.iter().filter(|&&v| v >= t).count() as f64;
        let n2 = tb.iter().filter(|&&v| v >= t).count() as f64;
        let d1 = ta.iter().zip(ea).filter(|(&v, &e)| e && v == t).count() as f64;
        let d2 = tb.iter().zip(eb).filter(|(&v, &e)| e && v == t).count() as f64;
        let (n, d) = (n1 + n2, d1 + d2);
        o_minus_e += d1 - d * n1 / n;
        if n > 1.0 {
            var += d * (n1 / n) * (n2 / n) * (n - d) / (n - 1.0);
        }
    }
    (o_minus_e, var)
}

/// Central difference of `f` along coordinate `k`.
pub fn central_difference(f: &dyn Fn(&[f64]) -> f64, w: &[f64], k: usize, h: f64) -> f64 {
    let mut plus = w.to_vec();
    let mut minus = w.to_vec();
    plus[k] += h;
    minus[k] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
}
