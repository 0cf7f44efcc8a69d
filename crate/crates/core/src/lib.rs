//! Censoring-aware pairwise ranking for time-to-event data.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`data`]: cohorts, covariate schemas, `[0, 1]` range scaling, comparable pairs,
//!   event-stratified splits and a synthetic cohort generator with known ground truth.
//! - [`model`]: the L1-regularized ranking model `f(x; w) = σ(wᵀx)` with a bipolar
//!   sigmoid, trained on a pairwise hinge loss by Adam.
//! - [`stats`]: Kaplan-Meier curves with Greenwood bands, the two-group log-rank test
//!   and Harrell's concordance index.
//! - [`bootstrap`]: repeated 60/40 discovery/validation runs, median-cutoff risk
//!   stratification, `2 p50` p-value combination and the sparse risk formula.
//! - [`baselines`]: a squared-hinge ranking SVM and an L1 Cox model for comparison.
//!
//! IO, file formats and the command line live in the companion `survrank` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` also rejects NaN, which is the point of those guards.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod baselines;
pub mod bootstrap;
pub mod data;
pub mod error;
pub mod math;
pub mod model;
pub mod stats;

mod sweep;

pub use error::{Error, Result};
