use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("segment `{label}` contains no values")]
    EmptySegment { label: String },

    #[error("year {0} has no data points")]
    MissingYear(i32),

    #[error("sum of values for baseline year {0} is zero")]
    ZeroBaseline(i32),

    #[error("value at position {index} is zero and cannot be used as a percent-change denominator")]
    DivisionByZero { index: usize },

    #[error("segment lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("input too large for {operation}: {detail}")]
    TooLarge {
        operation: &'static str,
        detail: String,
    },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: fractiondate is not strictly greater than the previous row")]
    Order { line: u64 },

    #[error("line {line}: total is zero")]
    ZeroTotal { line: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySegment { .. } => "EmptySegment",
            Error::MissingYear(_) => "MissingYear",
            Error::ZeroBaseline(_) => "ZeroBaseline",
            Error::DivisionByZero { .. } => "DivisionByZero",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::TooLarge { .. } => "TooLarge",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::Parse { .. } => "ParseError",
            Error::Order { .. } => "OrderError",
            Error::ZeroTotal { .. } => "ZeroTotal",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "IoError",
        }
    }

    /// True for errors caused by malformed, unreadable or incomplete input
    /// (including requested years absent from the data) rather than by the
    /// computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Order { .. }
                | Error::ZeroTotal { .. }
                | Error::InvalidArgument(_)
                | Error::MissingYear(_)
                | Error::EmptySegment { .. }
                | Error::Io(_)
        )
    }
}
