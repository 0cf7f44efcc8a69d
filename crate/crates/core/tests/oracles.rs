mod common;

use rand::Rng;
use survrank_core::data::comparable_pairs_from;
use survrank_core::stats::{chi_square_sf, concordance_index, km_estimate, logrank_test, Group};

use common::*;

#[test]
fn comparable_pairs_match_enumeration() {
    let mut r = rng(1);
    for _ in 0..100 {
        let n = r.random_range(1..=100);
        let (times, events) = random_outcomes(&mut r, n);
        let mut expected = brute_pairs(&times, &events);
        expected.sort();
        assert_eq!(comparable_pairs_from(&times, &events).pairs, expected);
    }
}

#[test]
fn concordance_counts_match_enumeration() {
    let mut r = rng(2);
    for _ in 0..100 {
        let n = r.random_range(2..=200);
        let (times, events) = random_outcomes(&mut r, n);
        let scores = random_scores(&mut r, n);
        let expected = brute_concordance(&scores, &times, &events);
        match concordance_index(&scores, &times, &events) {
            Ok(c) => {
                assert_eq!((c.concordant, c.discordant, c.tied), expected);
                let total = (expected.0 + expected.1 + expected.2) as f64;
                assert_eq!(c.c_index, (expected.0 as f64 + 0.5 * expected.2 as f64) / total);
            }
            Err(_) => assert_eq!(expected, (0, 0, 0)),
        }
    }
}

#[test]
fn chi_square_tail_matches_incomplete_gamma() {
    for i in 0..=400 {
        let x = i as f64 * 0.125;
        let ours = chi_square_sf(x, 1).unwrap();
        let reference = chi_square_1_tail(x);
        assert!((ours - reference).abs() <= 1e-12 + 1e-9 * reference, "x={x}: {ours} vs {reference}");
    }
    assert!((chi_square_sf(3.841459, 1).unwrap() - 0.05).abs() < 1e-6);
    assert!((chi_square_sf(6.634897, 1).unwrap() - 0.01).abs() < 1e-6);
}

#[test]
fn logrank_matches_textbook_sum() {
    let mut r = rng(3);
    let mut compared = 0;
    while compared < 200 {
        let na = r.random_range(1..30);
        let nb = r.random_range(1..30);
        let (ta, ea) = random_outcomes(&mut r, na);
        let (tb, eb) = random_outcomes(&mut r, nb);
        let (ome, var) = logrank_reference(&ta, &ea, &tb, &eb);
        match logrank_test(Group::new(&ta, &ea), Group::new(&tb, &eb)) {
            Ok(res) => {
                let chi = ome * ome / var;
                assert!((res.chi_square - chi).abs() <= 1e-9 * chi.max(1.0));
                assert!((res.variance - var).abs() <= 1e-9 * var.max(1.0));
                compared += 1;
            }
            Err(_) => assert!(var == 0.0),
        }
    }
}

#[test]
fn km_without_censoring_is_one_minus_ecdf() {
    let mut r = rng(4);
    for _ in 0..200 {
        let n = r.random_range(1..60);
        let (times, _) = random_outcomes(&mut r, n);
        let events = vec![true; n];
        let km = km_estimate(&times, &events).unwrap();
        for (k, &t) in km.event_times.iter().enumerate() {
            let le = times.iter().filter(|&&v| v <= t).count();
            assert_eq!(km.survival[k], (n - le) as f64 / n as f64);
        }
    }
}
