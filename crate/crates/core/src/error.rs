use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no type survives the min_df={min_df} filter")]
    EmptyVocabulary { min_df: u32 },

    #[error("corpus split directory missing: {0}")]
    MissingSplit(PathBuf),

    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },

    #[error("dimension mismatch at {location}: expected {expected}, found {found}")]
    DimensionMismatch {
        location: String,
        expected: usize,
        found: usize,
    },

    #[error("row {row} is the zero vector")]
    ZeroVector { row: usize },

    #[error("row {row} is not unit norm (norm {norm})")]
    NotNormalized { row: usize, norm: f64 },

    #[error("rank deficient: {rank} nonzero singular values, {requested} components requested")]
    RankDeficient { rank: usize, requested: usize },

    #[error("k={k} exceeds the number of distinct rows ({distinct})")]
    DegenerateInput { k: usize, distinct: usize },

    #[error("covariance of component {component} is not positive definite after regularization")]
    SingularCovariance { component: usize },

    #[error("topic sets disagree on k: {left} vs {right}")]
    MismatchedK { left: usize, right: usize },

    #[error("topic sets differ in provenance: {0}")]
    ProvenanceMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Wraps `self` with the pipeline stage (and its inputs) that produced it.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::EmptyVocabulary { .. } => "empty_vocabulary",
            Error::MissingSplit(_) => "missing_split",
            Error::Format { .. } => "format",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ZeroVector { .. } => "zero_vector",
            Error::NotNormalized { .. } => "not_normalized",
            Error::RankDeficient { .. } => "rank_deficient",
            Error::DegenerateInput { .. } => "degenerate_input",
            Error::SingularCovariance { .. } => "singular_covariance",
            Error::MismatchedK { .. } => "mismatched_k",
            Error::ProvenanceMismatch(_) => "provenance_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Config(_) => "config",
            Error::Json(_) => "json",
            Error::Stage { source, .. } => source.kind(),
        }
    }
}
