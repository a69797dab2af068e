use thiserror::Error;

/// Errors raised by the geometry, spectral and pipeline layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// User input failed validation (bad rotation number, bad flag, ...).
    #[error("{0}")]
    Validation(String),

    /// A numerical procedure failed to reach its tolerance.
    #[error("numerical error: {what} (achieved {achieved:.3e})")]
    Numerical { what: String, achieved: f64 },

    /// An eigenvalue sits too close to a classification boundary to be
    /// counted reliably.
    #[error("ambiguous classification: {0}")]
    Ambiguous(String),

    /// The boundary-form method cannot be used because its Dirichlet
    /// problem has a zero eigenvalue.
    #[error("boundary-form method inapplicable: {0}")]
    Inapplicable(String),

    /// Two independent routes produced different counts.
    #[error("route disagreement: {0}")]
    Inconsistency(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn numerical(what: impl Into<String>, achieved: f64) -> Self {
        Error::Numerical {
            what: what.into(),
            achieved,
        }
    }

    /// Process exit code: 1 for validation problems, 2 for everything the
    /// numerics could not settle.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Domain(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
