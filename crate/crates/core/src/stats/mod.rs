//! Kaplan-Meier, log-rank and concordance statistics.

mod chisq;
mod concordance;
mod km;
mod logrank;

pub use chisq::chi_square_sf;
pub use concordance::{concordance_index, risk_concordance, ConcordanceResult};
pub use km::{km_estimate, KmCurve};
pub use logrank::{logrank_test, Group, LogRankResult};
