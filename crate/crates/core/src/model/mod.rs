//! The L1-regularized pairwise ranking model.

mod adam;
mod objective;
mod scorer;
mod train;

pub use adam::Adam;
pub use objective::{objective, objective_gradient, PairwiseHinge};
pub use scorer::{bipolar_sigmoid, bipolar_sigmoid_derivative, score};
pub use train::{predict, train, train_scaled, EpochRecord, RankingFit, TrainConfig, TrainedModel};
