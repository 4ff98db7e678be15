//! Classification metrics and the line search for the smallest question
//! count that keeps segment assignment accurate.

mod find_k;
mod metrics;

pub use find_k::{
    find_k, find_k_with, random_subset, select_k, FindKConfig, FindKReport, KEvaluator,
    NetworkEvaluator, SelectionMode,
};
pub use metrics::{evaluate, f_score, ClassMetrics, EvaluationReport};

use thiserror::Error;

use crate::inference::InferenceError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("{predictions} predictions for {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("nothing to evaluate")]
    NoPredictions,
    #[error("class index {0} is out of range")]
    UnknownClass(usize),
    #[error("cannot draw {k} questions from a pool of {pool}")]
    KTooLarge { k: usize, pool: usize },
    #[error("test set has no segment labels")]
    UnlabeledTestSet,
    #[error("invalid find-k configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}
