use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entries contain a non-finite value")]
    NonFinite,

    #[error("matrix is not Hermitian: max entry deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive definite: min eigenvalue {min_eigenvalue:.6e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} below tolerance")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("cannot normalize a (near-)zero vector: squared norm {norm_sq:.3e}")]
    ZeroVector { norm_sq: f64 },

    #[error("matrix is not unitary: ||U†U - I|| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not a projector: ||M² - M|| = {deviation:.3e}")]
    NotProjector { deviation: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("ensemble members carry mixed normalization tags")]
    MixedNormalization,

    #[error("state is not normalized under the required convention: value {value:.12} (expected 1)")]
    NotNormalized { value: f64 },

    #[error("trace condition violated: Tr(Aρ) = {value:.12} (expected 1)")]
    TraceCondition { value: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("unknown basis name: {0}")]
    UnknownBasis(String),

    #[error("unknown unitary name: {0}")]
    UnknownUnitary(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("nonpositive lambda: {0}")]
    NonPositiveLambda(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
