use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid identifier `{0}`")]
    InvalidName(String),

    #[error("invalid parameter value `{0}`")]
    InvalidValue(String),

    #[error("invalid parameter instance `{0}`")]
    InvalidInstance(String),

    #[error("{}parameter `{param}` bound more than once", line_prefix(*line))]
    DuplicateParam { param: String, line: Option<usize> },

    #[error("instance binds {size} parameters, more than the enumeration cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("no unique maximum below `{0}`: instance set is not lub closed")]
    NoUniqueMax(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("event `{0}` is not in the monitor's alphabet")]
    UnknownEvent(String),

    #[error("event `{event}` uses undeclared parameter `{param}`")]
    UndeclaredParameter { event: String, param: String },

    #[error("line {line}: {message}")]
    SpecSyntax { line: usize, message: String },

    #[error("event `{0}` declared more than once")]
    DuplicateEventDecl(String),

    #[error("pattern column {column}: {message}")]
    PatternSyntax { column: usize, message: String },

    #[error("pattern mentions undeclared event `{0}`")]
    UnknownEventInPattern(String),
}

impl Error {
    /// Whether this error is an enumeration-cap violation.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}
