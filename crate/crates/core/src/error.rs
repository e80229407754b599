use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian: relative residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("spectral function is not finite at eigenvalue {eigenvalue}")]
    Range { eigenvalue: f64 },

    #[error("operator is numerically singular: smallest/largest singular value {ratio:.3e}")]
    Singular { ratio: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspace is not standard ({verdict}); witness norm {witness_norm:.3e}")]
    NotStandard {
        verdict: crate::subspace::Standardness,
        witness: Vec<num_complex::Complex64>,
        witness_norm: f64,
    },

    #[error("identity `{identity}` violated: residual {residual:.3e}")]
    Invariant { identity: String, residual: f64 },

    #[error("modular spectrum is not symmetric: log-eigenvalue {log_lambda} has no partner")]
    UnpairedEigenvalue { log_lambda: f64 },

    #[error("Lorentz part is not proper (det = {det})")]
    Improper { det: f64 },

    #[error("not a Lorentz transformation: metric residual {residual:.3e}")]
    NotLorentz { residual: f64 },

    #[error("wedge is not included in the target wedge; witness point {witness:?}")]
    NotIncluded { witness: Vec<f64> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
