use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema: {0}")]
    Schema(String),

    #[error("row {row}, column `{column}`: {reason}")]
    Cell {
        row: usize,
        column: String,
        reason: String,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("coefficient of variation of `{0}` is undefined (mean is zero)")]
    UndefinedCv(String),

    #[error("bin edges must be at least two strictly increasing finite values")]
    InvalidBinEdges,

    #[error("value {value} of `{variable}` (row {row}) falls outside every bin")]
    OutsideBins {
        variable: String,
        row: usize,
        value: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coefficients do not align with dataset predictors: {0}")]
    Misaligned(String),

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityDomain(f64),

    #[error("matrix is not positive definite: pivot {pivot:e} at row {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("information matrix is singular at iteration {iteration}")]
    SingularInformation { iteration: usize },

    #[error("predictor `{0}` is constant and aliased with the intercept")]
    ConstantPredictor(String),

    #[error("response has no variation: every observation is {0}")]
    DegenerateResponse(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("negative variance {value:e} on covariance diagonal at index {index}")]
    NegativeVariance { index: usize, value: f64 },

    #[error("standard error must be positive and finite, got {0}")]
    NonPositiveSe(f64),

    #[error("full-model log-likelihood {full} is below the null {null}; the fit is broken")]
    LikelihoodOrder { full: f64, null: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Hosmer-Lemeshow group {group} is degenerate: {reason}")]
    DegenerateGroup { group: usize, reason: String },

    #[error("response needs both ones and zeros to form pairs")]
    NoPairs,

    #[error("pair-counting input `{0}` is not sorted ascending")]
    Unsorted(&'static str),

    #[error("invalid synthetic data description: {0}")]
    SynthSpec(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
