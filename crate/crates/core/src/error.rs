use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("eigenvalue {eigenvalue} lies outside the domain {domain} of `{function}`")]
    Domain {
        function: String,
        eigenvalue: f64,
        domain: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown function `{id}`; valid ids: {valid}")]
    UnknownFunction { id: String, valid: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("function `{0}` has no analytic continuation to the upper half-plane")]
    Unsupported(String),

    #[error("integral representation error: {0}")]
    Representation(String),

    #[error("instance generation failed for {kind}: {reason}")]
    Generation { kind: String, reason: String },

    #[error("unknown suite `{name}`; valid suites: {valid}")]
    UnknownSuite { name: String, valid: String },

    #[error(
        "converse search inconclusive: no violation on the lambda grid (largest-lambda defect spectrum {spectrum:?})"
    )]
    Inconclusive { spectrum: Vec<f64> },

    #[error("report schema mismatch: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
