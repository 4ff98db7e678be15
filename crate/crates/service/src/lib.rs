//! Live survey sessions over HTTP: each session asks k random questions and
//! returns the segment posterior after every answer.

mod http;
mod session;

pub use http::{router, serve};
pub use session::{
    AnswerOutcome, CreatedSession, QuestionView, ServiceConfig, Session, SessionView,
    SurveyService, DEFAULT_TTL,
};

use askless_core::InferenceError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ServiceError {
    #[error("unknown or expired session")]
    UnknownSession,
    #[error("cannot ask {k} questions from a pool of {pool}")]
    KTooLarge { k: usize, pool: usize },
    #[error("question `{0}` is not part of this session")]
    QuestionNotInSet(String),
    #[error("question `{0}` was already answered")]
    AlreadyAnswered(String),
    #[error("`{value}` is not a level of `{question}`")]
    InvalidLevel { question: String, value: String },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

impl ServiceError {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownSession => "UnknownSession",
            ServiceError::KTooLarge { .. } => "KTooLarge",
            ServiceError::QuestionNotInSet(_) => "QuestionNotInSet",
            ServiceError::AlreadyAnswered(_) => "AlreadyAnswered",
            ServiceError::InvalidLevel { .. } => "InvalidLevel",
            ServiceError::InvalidRequest(_) => "InvalidRequest",
            ServiceError::Inference(
                InferenceError::ZeroProbabilityEvidence | InferenceError::AllZeroWeights,
            ) => "ImpossibleAnswers",
            ServiceError::Inference(_) => "InferenceFailed",
        }
    }
}
