use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no input")]
    NoInput,

    #[error("no output produced")]
    NoOutput,

    #[error("no sessions")]
    NoSessions,

    #[error("insufficient samples: {0} usable rows, need at least 3")]
    InsufficientSamples(usize),

    #[error("constant column: ranks are undefined")]
    ConstantColumn,

    #[error("column lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("reference length required for {0}")]
    MissingReference(&'static str),

    #[error("{metric} is not defined on {timeline} timelines")]
    IncompatibleTimeline {
        metric: &'static str,
        timeline: &'static str,
    },

    #[error("session has no computation-span annotations")]
    MissingSpans,

    #[error("cannot concatenate: {0}")]
    Mismatch(String),

    #[error("chunk boundary {index} out of range for {len} tokens")]
    BoundaryOutOfRange { index: usize, len: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
