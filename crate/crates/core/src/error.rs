use thiserror::Error;

/// Errors raised anywhere in the affect-recognition and adaptation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ambiguous label: valence={valence}, arousal={arousal} (a component is exactly 0)")]
    AmbiguousLabel { valence: f64, arousal: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("schema violation{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Schema { line: Option<usize>, message: String },

    #[error("baseline must come from window 0, got window {0}")]
    WrongWindow(u32),

    #[error("zero variance in channel {channel}; z-score normalization undefined")]
    ZeroVariance { channel: usize },

    #[error("signal too short: {len} samples, need at least {needed}")]
    SignalTooShort { len: usize, needed: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("need at least {needed} distinct classes, found {found}")]
    InsufficientClasses { needed: usize, found: usize },

    #[error("class {class} has {count} training samples, need at least {needed}")]
    InsufficientClassData { class: String, count: usize, needed: usize },

    #[error("pooled covariance is singular even after ridge regularization")]
    SingularCovariance,

    #[error("SVM solver did not reach KKT tolerance after {iterations} iterations (max violation {violation:.3e})")]
    SolverNonConvergence { iterations: usize, violation: f64 },

    #[error("need at least 2 participants for leave-one-subject-out, found {0}")]
    TooFewParticipants(usize),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }

    pub(crate) fn schema(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Schema { line, message: message.into() }
    }
}
