//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by data validation, estimation and forecasting.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file; `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An event record violates the triangular observation scheme.
    #[error(
        "event {index} outside triangular support: delay={delay}, underwriting={underwriting}, horizon={horizon}"
    )]
    EventOutsideSupport {
        index: usize,
        delay: f64,
        underwriting: f64,
        horizon: f64,
    },

    /// A constructor argument violates a documented invariant.
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// Smoothed exposure is below the mask threshold everywhere.
    #[error("no exposure in range")]
    NoExposure,

    /// The occurrence marginal vanishes over the whole active range of an axis.
    #[error("unidentifiable component on axis {axis}: occurrence marginal is zero on its active range")]
    UnidentifiableComponent { axis: usize },

    /// Cross-validation needs at least one cell with positive occurrence.
    #[error("no events")]
    NoEvents,

    /// Every bandwidth candidate failed; the message lists per-candidate reasons.
    #[error("all bandwidth candidates failed:\n{0}")]
    AllCandidatesFailed(String),

    /// Chain-ladder development factor with an empty or zero denominator column.
    #[error("development factor for column {column} has zero denominator")]
    ZeroDevelopmentFactor { column: usize },

    /// A claim's observed-report probability is numerically zero.
    #[error("observed-report probability below floor for underwriting cell {cell}")]
    ReserveDenominator { cell: usize },

    /// Truncation rejects essentially every simulated draw.
    #[error("degenerate truncation: acceptance probability {probability}")]
    DegenerateTruncation { probability: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<V> = std::result::Result<V, Error>;

impl Error {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            why: why.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
