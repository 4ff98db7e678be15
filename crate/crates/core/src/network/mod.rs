//! Core graphical-model types: survey schemas, DAGs, conditional probability
//! tables and complete networks.

pub(crate) mod bn;
mod cpt;
mod dag;
mod json;
mod random;
mod schema;

pub use bn::{BayesianNetwork, Evidence};
pub use cpt::Cpt;
pub use dag::Dag;
pub use random::{random_network, RandomNetworkSpec};
pub use schema::{QuestionSpec, Role, SurveySchema};

use thiserror::Error;

/// Tolerance for CPT row sums at construction.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Tolerance for CPT row sums read back from a serialized network. Rows within
/// this distance of 1 are renormalized, anything further is rejected.
pub const DESERIALIZE_ROW_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("question abbreviation must not be empty")]
    EmptyAbbr,
    #[error("duplicate question abbreviation `{0}`")]
    DuplicateAbbr(String),
    #[error("question `{abbr}` needs at least two distinct levels")]
    BadLevels { abbr: String },
    #[error("schema has no question with role=label matching `{0}`")]
    MissingLabelVar(String),
    #[error("schema has more than one role=label question")]
    MultipleLabels,

    #[error("a DAG needs at least one node")]
    NoNodes,
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("self loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("cycle detected: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),

    #[error("CPT for `{variable}`: {reason}")]
    InvalidCpt { variable: String, reason: String },
    #[error("missing value for parent `{0}`")]
    MissingParentValue(String),
    #[error("level index {level} is out of range for `{variable}`")]
    InvalidLevel { variable: String, level: usize },
    #[error("unknown level `{level}` for `{variable}`")]
    UnknownLevel { variable: String, level: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("network nodes do not match the schema: {0}")]
    NodeMismatch(String),
    #[error("assignment covers {got} of {expected} variables")]
    IncompleteAssignment { expected: usize, got: usize },
}
