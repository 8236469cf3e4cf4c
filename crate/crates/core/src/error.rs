use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument or physical parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A scenario cannot be set up (bad vehicle count, overlapping cars, ...).
    #[error("invalid configuration: {0}")]
    Configuration(String),

    /// A config invariant failed during resolution.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        message: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("Lambert W iteration did not converge on branch {branch} for z = {z}")]
    LambertW { branch: i32, z: String },

    #[error("no sign change of the growth rate in [{lo}, {hi}] s")]
    Bracket { lo: f64, hi: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("delayed history does not cover the requested lookup")]
    History,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status: 2 for bad input, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_)
            | Error::Configuration(_)
            | Error::Validation(_)
            | Error::Parse { .. }
            | Error::Range(_)
            | Error::Shape(_) => 2,
            Error::Numerical(_)
            | Error::LambertW { .. }
            | Error::Bracket { .. }
            | Error::InsufficientData(_)
            | Error::History => 3,
            Error::Io(_) => 1,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}
