//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while parsing inputs or computing metrics.
///
/// All variants except [`Error::Internal`] describe bad input data; the CLI
/// maps them to exit code 2 and `Internal` to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A text format violated its grammar. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A binary stream violated the scores layout.
    #[error("binary scores: {0}")]
    BinaryFormat(String),

    /// Invalid span boundaries (offset must exceed a non-negative onset).
    #[error("invalid time span [{onset}, {offset}): offset must be greater than onset and onset must be non-negative")]
    InvalidSpan { onset: f64, offset: f64 },

    /// A recording id was looked up in an evaluation map that does not have it.
    #[error("unknown recording id \"{0}\" (not present in the evaluation map)")]
    UnknownRecording(String),

    /// Reference and hypothesis annotations name different recordings.
    #[error("recording id mismatch: reference \"{reference}\" vs hypothesis \"{hypothesis}\"")]
    RecordingMismatch {
        reference: String,
        hypothesis: String,
    },

    /// Two frame matrices disagree on (count, step, start).
    #[error("frame geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// Rates are undefined when the evaluated reference is empty.
    #[error("no reference speech: total reference duration is zero")]
    NoReferenceSpeech,

    /// Recordings that carry metrics but have no metadata row.
    #[error("recordings missing metadata: {}", .0.join(", "))]
    MissingMetadata(Vec<String>),

    /// The metadata table is empty.
    #[error("no metadata")]
    NoMetadata,

    /// Threshold tuning needs at least one development recording.
    #[error("empty development set: no score matrices to tune on")]
    EmptyDevSet,

    /// Agreement needs the two annotators to share at least one recording.
    #[error("annotators share no recording ids")]
    DisjointAnnotators,

    /// OLS needs at least two distinct x values.
    #[error("degenerate regression input: {0}")]
    DegenerateRegression(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// An internal invariant was violated; indicates a bug, not bad data.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
