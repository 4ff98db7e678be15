//! Structure learning by greedy hill climbing over DAGs and maximum-likelihood
//! parameter fitting.

mod hill_climb;
mod mle;
mod score;

pub use hill_climb::{hill_climb, hill_climb_traced, HillClimbConfig, HillClimbResult};
pub use mle::fit_mle;
pub use score::{family_score, log_likelihood, parameter_count, score, Criterion};

use thiserror::Error;

use crate::network::NetworkError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("dataset has no column for `{0}`")]
    MissingColumn(String),
    #[error("inconsistent edge constraints: {0}")]
    InconsistentConstraints(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("smoothing must be finite and non-negative, got {0}")]
    InvalidSmoothing(f64),
    #[error(transparent)]
    Network(#[from] NetworkError),
}
