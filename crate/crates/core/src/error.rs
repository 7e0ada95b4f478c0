use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol value {value} at x = {x} is not above the positivity floor {floor}")]
    NonPositiveSymbol { x: f64, value: f64, floor: f64 },

    #[error("x = {x} is outside the symbol's domain")]
    OutOfDomain { x: f64 },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("translation {t} is not a positive integer multiple of the grid step {h}")]
    NonGridTranslation { t: f64, h: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("operator has {terms} shift terms; a single-term operator is required")]
    NotSingleTerm { terms: usize },

    #[error("grid of {n} points exceeds the dense limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("operators {i} and {j} do not commute (residual {residual:e})")]
    NotCommuting { i: usize, j: usize, residual: f64 },

    #[error("tuple is not toral left-invertible (alpha = {alpha:e})")]
    NotLeftInvertible { alpha: f64 },

    #[error("tuple is not jointly left-invertible (alpha = {alpha:e})")]
    NotJointlyLeftInvertible { alpha: f64 },

    #[error("truncation exceeds grid: needs {needed} points, grid has {available}")]
    TruncationExceedsGrid { needed: usize, available: usize },

    #[error("point {coordinate} lies outside the polydisc (|z| = {modulus}, radius {radius})")]
    OutsidePolydisc { coordinate: usize, modulus: f64, radius: f64 },

    #[error("spherical Cauchy dual does not commute (residual {residual:e})")]
    DualNotCommuting { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Configuration problems (as opposed to failures inside an analysis).
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Validation { .. })
    }
}
