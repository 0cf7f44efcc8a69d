//! Cohorts, schemas, scaling, comparable pairs, splits and synthetic data.

mod cohort;
mod pairs;
mod scaling;
mod schema;
mod split;
mod synth;

pub use cohort::{Cohort, SubjectRecord};
pub use pairs::{comparable_pairs, comparable_pairs_from, count_comparable_pairs, PairSet};
pub use scaling::{apply_scaling, fit_scaling, ScalingParams};
pub use schema::{Covariate, CovariateKind, CovariateSchema, OneHotGroup};
pub use split::{split_indices, stratified_split, SplitIndices};
pub use synth::{default_beta, generate_synthetic, SyntheticCohort, SyntheticGroundTruth, MIN_SYNTHETIC_SIZE};
