use std::fmt;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by geometry construction, density operations, metric
/// evaluation, and file ingestion.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A polygon or tessellation violates its structural invariants.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A density has zero or non-finite total mass, or an operation would
    /// produce one (e.g. a posterior whose product mass vanishes).
    #[error("degenerate density: {0}")]
    DegenerateDensity(String),

    /// A value lies outside the domain an operation is defined on.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// An input record is malformed or inconsistent with its schema
    /// (duplicate ids, mixed region sets, empty trial lists, ...).
    #[error("schema error: {0}")]
    Schema(String),

    /// Trials of one family were fed to a metric that scores another.
    #[error("trial family mismatch: {0}")]
    FamilyMismatch(String),

    /// A computation method was requested for inputs it does not support.
    #[error("method error: {0}")]
    Method(String),

    /// Too few data points to perform a fit.
    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A numeric parameter lies outside its admissible interval.
    #[error("domain error: {0}")]
    Domain(String),

    /// Underlying I/O failure.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// JSON parse failure, with the offending location when known.
    #[error("parse error in {path}{}: {source}", fmt_line(.line))]
    Parse {
        path: String,
        /// 1-based line of the offending record, when the format is line
        /// oriented.
        line: Option<usize>,
        #[source]
        source: serde_json::Error,
    },
}

fn fmt_line(line: &Option<usize>) -> String {
    match line {
        Some(n) => format!(" (line {n})"),
        None => String::new(),
    }
}

impl Error {
    /// Wrap an I/O failure with the file it concerned.
    pub fn io(path: impl fmt::Display, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: impl fmt::Display, source: serde_json::Error) -> Self {
        Error::Parse {
            path: path.to_string(),
            line: None,
            source,
        }
    }

    pub(crate) fn parse_line(
        path: impl fmt::Display,
        line: usize,
        source: serde_json::Error,
    ) -> Self {
        Error::Parse {
            path: path.to_string(),
            line: Some(line),
            source,
        }
    }
}
