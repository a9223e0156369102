use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed file: {message}")]
    MalformedFile {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: schema violation at {record}: {message}")]
    SchemaViolation {
        path: PathBuf,
        line: usize,
        record: String,
        message: String,
    },
    #[error("dataset has no items")]
    EmptyDataset,
    #[error("gold answer list is empty")]
    EmptyGolds,
    #[error("option index {index} out of range for {len} options")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("wrong question style: expected {expected}, found {found}")]
    WrongStyle { expected: String, found: String },
    #[error("item {item_id}: prediction kind does not match style (expected {expected})")]
    KindMismatch { item_id: String, expected: String },
    #[error("item {0}: question has no tokens")]
    EmptyQuestion(String),
    #[error("item {0}: answer containment needs a span projection for this style")]
    MissingProjection(String),
    #[error("projection target is empty")]
    EmptyTarget,
    #[error("projection context is empty")]
    EmptyContext,
    #[error("predictions reference unknown item ids: {}", .0.join(", "))]
    UnknownItemIds(Vec<String>),
    #[error("strict mode: {} item(s) have no prediction: {}", .0.len(), .0.join(", "))]
    MissingPredictions(Vec<String>),
    #[error("variant mismatch: expected {expected}, found {found}")]
    VariantMismatch { expected: String, found: String },
    #[error("coverage gap: {what} missing for {}", .ids.join(", "))]
    CoverageGap { what: String, ids: Vec<String> },
    #[error("subset {subset} has {available} items, {requested} requested")]
    SubsetTooSmall {
        subset: String,
        available: usize,
        requested: usize,
    },
    #[error("unknown task id {0}")]
    UnknownTaskId(String),
    #[error("no annotation records")]
    EmptyRecords,
    #[error("vector is constant; correlation undefined")]
    DegenerateVector,
    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("provenance mismatch on {field}: {left} vs {right}")]
    ProvenanceMismatch {
        field: String,
        left: String,
        right: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub(crate) fn malformed(path: &Path, line: usize, message: impl Into<String>) -> Self {
        Error::MalformedFile {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn schema(
        path: &Path,
        line: usize,
        record: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::SchemaViolation {
            path: path.to_path_buf(),
            line,
            record: record.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::MalformedFile { .. } => "malformed_file",
            Error::SchemaViolation { .. } => "schema_violation",
            Error::EmptyDataset => "empty_dataset",
            Error::EmptyGolds => "empty_golds",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::WrongStyle { .. } => "wrong_style",
            Error::KindMismatch { .. } => "kind_mismatch",
            Error::EmptyQuestion(_) => "empty_question",
            Error::MissingProjection(_) => "missing_projection",
            Error::EmptyTarget => "empty_target",
            Error::EmptyContext => "empty_context",
            Error::UnknownItemIds(_) => "unknown_item_ids",
            Error::MissingPredictions(_) => "missing_predictions",
            Error::VariantMismatch { .. } => "variant_mismatch",
            Error::CoverageGap { .. } => "coverage_gap",
            Error::SubsetTooSmall { .. } => "subset_too_small",
            Error::UnknownTaskId(_) => "unknown_task_id",
            Error::EmptyRecords => "empty_records",
            Error::DegenerateVector => "degenerate_vector",
            Error::LengthMismatch(..) => "length_mismatch",
            Error::TooFewPoints(_) => "too_few_points",
            Error::ProvenanceMismatch { .. } => "provenance_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
