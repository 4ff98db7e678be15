//! Survey schemas, response files, the derived DIS attribute and the synthetic
//! respondent generator.

mod csv_io;
mod dis;
mod generator;

pub use csv_io::{read_csv, read_csv_from, write_csv, write_csv_to};
pub use dis::{derive_dis, DIS, USAGE_QUESTIONS};
pub use generator::{generate_synthetic, GeneratorConfig};

use thiserror::Error;

use crate::dataset::DatasetError;
use crate::network::{BayesianNetwork, NetworkError, SurveySchema};

const DEFAULT_SCHEMA: &str = include_str!("../../assets/default_schema.json");
const DEFAULT_GENERATOR: &str = include_str!("../../assets/default_generator.json");
const DEFAULT_NETWORK: &str = include_str!("../../assets/default_network.json");

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error(transparent)]
    Schema(#[from] NetworkError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(String),
    #[error("file is empty")]
    EmptyFile,
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("invalid level `{value}` at row {row}, column `{column}`")]
    InvalidLevel {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row} has {got} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("missing usage answer `{0}` needed to derive DIS")]
    MissingUsageAnswer(String),
    #[error("generator profiles do not match the schema: {0}")]
    ProfileSchemaMismatch(String),
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
}

impl From<csv::Error> for SurveyError {
    fn from(e: csv::Error) -> Self {
        SurveyError::Csv(e.to_string())
    }
}

/// Parses a schema document (`{"labelVar": ..., "questions": [...]}`).
pub fn load_schema(document: &str) -> Result<SurveySchema, SurveyError> {
    Ok(SurveySchema::from_json(document)?)
}

/// The bundled 24-variable ISP questionnaire: 22 asked questions, the derived
/// DIS attribute and the SGV2 segment label.
pub fn default_schema() -> SurveySchema {
    SurveySchema::from_json(DEFAULT_SCHEMA).expect("bundled schema is valid")
}

/// Four-segment generator matched to [`default_schema`].
pub fn default_generator_config() -> GeneratorConfig {
    serde_json::from_str(DEFAULT_GENERATOR).expect("bundled generator config is valid")
}

/// Network learned (hill climbing, AIC, MLE) from 70% of 10,000 respondents
/// drawn from [`default_generator_config`] with seed 42.
pub fn default_network() -> BayesianNetwork {
    BayesianNetwork::from_json(DEFAULT_NETWORK).expect("bundled network is valid")
}
