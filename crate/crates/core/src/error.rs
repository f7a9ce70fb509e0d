use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sequence length {0} is odd; a half swap needs an even length")]
    OddLength(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index range {lo}..{hi} is outside a sequence of length {len}")]
    Bounds { lo: usize, hi: usize, len: usize },

    #[error("estimator expects a {expected} interferogram")]
    WrongSetup { expected: &'static str },

    #[error("reference amplitude must be positive and finite, got {0}")]
    InvalidReference(f64),

    #[error("invalid estimator variant: {0}")]
    InvalidVariant(String),

    #[error("magnitude estimation requires a non-negative truth; caller marked it sign-indefinite")]
    SignIndefinite,

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("ill-posed system: {0}")]
    IllPosed(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("convention conflict: {0}")]
    ConventionConflict(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::InvalidVariant(_) | Error::InvalidReference(_) => 1,
            Error::InconsistentData(_) | Error::IllPosed(_) => 3,
            _ => 2,
        }
    }
}
