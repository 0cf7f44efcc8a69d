//! Comparison methods: a ranking SVM and an L1 Cox model.

mod compare;
mod cox;
mod ssvm;

pub use compare::{compare_methods, validate_compare, CompareConfig, ComparisonTable, MethodRow, Rankers};
pub use cox::{cox_nll, cox_nll_and_gradient, soft_threshold, train_cox_l1, train_cox_l1_scaled, CoxL1Config, CoxModel, CoxRanker};
pub use ssvm::{ssvm_gradient, ssvm_objective, train_ssvm, train_ssvm_scaled, SquaredHinge, SsvmConfig, SsvmFit, SsvmRanker};
