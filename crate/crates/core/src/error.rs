use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing label column `{0}`")]
    MissingLabelColumn(String),
    #[error("label column must hold exactly two distinct values, found {0}")]
    LabelCardinality(usize),
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("missing value in column `{column}` at row {row}")]
    MissingValue { column: String, row: usize },
    #[error("mixed column `{column}`: `{value}` is not numeric")]
    MixedColumn { column: String, value: String },
    #[error("dataset has no rows")]
    EmptyData,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid schema line {line}: {reason}")]
    InvalidSchema { line: usize, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("feature id {feature} out of range for {feature_count} features")]
    FeatureOutOfRange { feature: usize, feature_count: usize },
    #[error("malformed tree text at byte {offset}: {reason}")]
    MalformedTree { offset: usize, reason: String },
    #[error("no feasible tree: {0}")]
    Infeasible(String),
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("{0}")]
    Metric(String),
    #[error("unknown objective `{0}`")]
    UnknownObjective(String),
    #[error("unknown tuning method `{0}`")]
    UnknownTuneMethod(String),
}
