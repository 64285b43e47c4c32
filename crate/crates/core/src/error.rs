use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Variants fall into four classes (see [`ErrorClass`]) which the CLI maps
/// onto exit codes and the C ABI maps onto status codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian: ‖A − A†‖_F = {deviation:.3e} exceeds {allowed:.3e}")]
    Symmetry { deviation: f64, allowed: f64 },

    #[error("size limit exceeded: {what} = {size} > maximum {max}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        max: usize,
    },

    #[error("enumeration limit exceeded: {count} subsets > maximum {max}")]
    EnumerationLimit { count: usize, max: usize },

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e} below {allowed:.3e}")]
    NotPsd { min_eigenvalue: f64, allowed: f64 },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("particle index {index} out of range 1..={n}")]
    Index { index: usize, n: usize },

    #[error("degenerate subsystem: {0}")]
    DegenerateSubsystem(String),

    #[error("subsystems overlap: {0}")]
    Overlap(String),

    #[error("partition does not cover all particles: {0}")]
    Cover(String),

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error classes with a stable numeric code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or invalid input.
    Input,
    /// Size or enumeration limit.
    Limit,
    /// A numerical invariant broke internally.
    Internal,
}

impl ErrorClass {
    /// Process exit code for the class.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Input => 2,
            ErrorClass::Limit => 3,
            ErrorClass::Internal => 4,
        }
    }
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::SizeLimit { .. } | Error::EnumerationLimit { .. } => ErrorClass::Limit,
            Error::Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Input,
        }
    }
}
