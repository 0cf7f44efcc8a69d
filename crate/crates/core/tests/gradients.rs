mod common;

use rand::Rng;
use survrank_core::baselines::{cox_nll, cox_nll_and_gradient, ssvm_gradient, ssvm_objective, SquaredHinge};
use survrank_core::data::comparable_pairs_from;
use survrank_core::math::Matrix;
use survrank_core::model::{bipolar_sigmoid, objective, objective_gradient, PairwiseHinge};

use common::{central_difference, random_outcomes, relative_error, rng};

const POINTS: usize = 20;
const H: f64 = 1e-6;
const TOL: f64 = 1e-5;

struct Instance {
    x: Matrix,
    times: Vec<f64>,
    events: Vec<bool>,
}

fn instance(seed: u64, n: usize, d: usize) -> Instance {
    let mut r = rng(seed);
    let x = Matrix::from_rows(n, d, (0..n * d).map(|_| r.random_range(0.0..1.0)).collect());
    let (times, mut events) = random_outcomes(&mut r, n);
    events[0] = true;
    Instance { x, times, events }
}

fn random_weights(r: &mut impl Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d)
        .map(|_| {
            let v: f64 = r.random_range(0.05..scale);
            if r.random_bool(0.5) { v } else { -v }
        })
        .collect()
}

#[test]
fn ranking_subgradient_matches_finite_differences() {
    let inst = instance(11, 40, 4);
    let pairs = comparable_pairs_from(&inst.times, &inst.events);
    let sweep = PairwiseHinge::new(&inst.x, &inst.times, &inst.events).unwrap();
    let lambda = 0.01;
    let mut r = rng(12);
    let mut checked = 0;
    while checked < POINTS {
        let w = random_weights(&mut r, 4, 3.0);
        // Stay well clear of every hinge kink.
        let f: Vec<f64> = inst.x.mul_vec(&w).into_iter().map(bipolar_sigmoid).collect();
        let near_kink = pairs.iter().any(|&(i, j)| (1.0 - (f[i] - f[j])).abs() < 1e-3);
        if near_kink {
            continue;
        }
        let q = |v: &[f64]| objective(v, &inst.x, &pairs, lambda).unwrap();
        let g = objective_gradient(&w, &inst.x, &pairs, lambda).unwrap();
        let (_, g_sweep) = sweep.evaluate(&w, lambda, 4);
        for k in 0..4 {
            let fd = central_difference(&q, &w, k, H);
            assert!(relative_error(g[k], fd) < TOL, "k={k}: {} vs {fd}", g[k]);
            assert!(relative_error(g_sweep[k], fd) < TOL);
        }
        checked += 1;
    }
}

#[test]
fn ssvm_gradient_matches_finite_differences() {
    let inst = instance(21, 40, 4);
    let pairs = comparable_pairs_from(&inst.times, &inst.events);
    let sweep = SquaredHinge::new(&inst.x, &inst.times, &inst.events).unwrap();
    let mut r = rng(22);
    for _ in 0..POINTS {
        let w = random_weights(&mut r, 4, 3.0);
        let q = |v: &[f64]| ssvm_objective(v, &inst.x, &pairs, 0.1).unwrap();
        let g = ssvm_gradient(&w, &inst.x, &pairs, 0.1).unwrap();
        let (_, g_sweep) = sweep.evaluate(&w, 0.1);
        for k in 0..4 {
            let fd = central_difference(&q, &w, k, H);
            assert!(relative_error(g[k], fd) < TOL, "k={k}: {} vs {fd}", g[k]);
            assert!(relative_error(g_sweep[k], fd) < TOL);
        }
    }
}

#[test]
fn cox_gradient_matches_finite_differences() {
    let inst = instance(31, 40, 4);
    let mut r = rng(32);
    for _ in 0..POINTS {
        let w = random_weights(&mut r, 4, 2.0);
        let q = |v: &[f64]| cox_nll(v, &inst.x, &inst.times, &inst.events).unwrap();
        let (_, g) = cox_nll_and_gradient(&w, &inst.x, &inst.times, &inst.events).unwrap();
        for k in 0..4 {
            let fd = central_difference(&q, &w, k, H);
            assert!(relative_error(g[k], fd) < TOL, "k={k}: {} vs {fd}", g[k]);
        }
    }
}
