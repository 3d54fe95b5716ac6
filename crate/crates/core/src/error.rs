use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the library.
///
/// Numerical inconsistencies (a structural test and a norm-based test
/// disagreeing, or two computation routes drifting apart) are reported as
/// errors rather than resolved silently.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent p = {0}; p must lie in [1, inf]")]
    InvalidExponent(f64),

    #[error("{op} requires p in the open interval (1, inf), got p = {p}")]
    ExponentNotInterior { op: &'static str, p: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{op} caps the dimension at {cap}, got n = {n}")]
    DimensionCap {
        op: &'static str,
        cap: usize,
        n: usize,
    },

    #[error("zero vector passed to {0}")]
    ZeroVector(&'static str),

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("eigenvalue {value} of the argument lies on the branch cut of {function}")]
    SpectrumOnCut { function: String, value: Complex64 },

    #[error("zero eigenvalue is not semisimple (nilpotent block residual {residual:.3e})")]
    NonSemisimpleKernel { residual: f64 },

    #[error("series did not converge within {max_terms} terms; use the spectral route")]
    SeriesBudget { max_terms: usize },

    #[error("computation routes disagree by {disagreement:.3e} (tolerance {tol:.1e}) in {op}")]
    RouteDisagreement {
        op: &'static str,
        disagreement: f64,
        tol: f64,
    },

    #[error("inconsistency in {op}: {detail}")]
    Inconsistent { op: &'static str, detail: String },

    #[error("precondition violated in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("matrix JSON: {0}")]
    MatrixFormat(String),

    #[error("unknown experiment '{0}'")]
    UnknownExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
