//! Discrete Bayesian-network toolkit for shortening market-research surveys.
//!
//! The pipeline has two phases. In the preparatory phase a network is learned
//! from full-questionnaire responses ([`learning`]) and the smallest number of
//! randomly chosen questions that still classifies customers well is found
//! ([`reduction`]). In the scaling phase each customer answers only that many
//! questions and the segment posterior is computed from the partial answers
//! ([`inference`]).

pub mod dataset;
pub mod inference;
pub mod learning;
pub mod network;
pub mod reduction;
pub mod rng;
pub mod survey;

pub use dataset::{Dataset, DatasetError};
pub use inference::{Engine, InferenceError, Posterior};
pub use network::{
    BayesianNetwork, Cpt, Dag, Evidence, NetworkError, QuestionSpec, Role, SurveySchema,
};
