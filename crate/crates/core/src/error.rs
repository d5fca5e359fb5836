use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Variants map onto the failure modes of individual operations; the CLI
/// maps `BudgetExceeded` to exit code 2 and everything that signals bad
/// input to exit code 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pieces overlap, touch or are out of order (pieces {0} and {1})")]
    OverlappingPieces(usize, usize),
    #[error("transition relation is not topologically mixing")]
    NonMixingTransitions,
    #[error("branch on piece {piece} is not expanding (|derivative| >= {min_derivative})")]
    ContractionViolation { piece: usize, min_derivative: f64 },
    #[error("branch on piece {piece} does not map onto the hull of its targets (error {error:e})")]
    MarkovViolation { piece: usize, error: f64 },
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("interval length {length:e} fell below the floor {floor:e} at depth {depth}")]
    PrecisionLoss { depth: usize, length: f64, floor: f64 },
    #[error("cover contains an interval of zero length")]
    DegenerateCover,
    #[error("depth {0} exposes no gaps")]
    NoGaps(usize),
    #[error("target interval is empty after applying the margin")]
    EmptyTarget,
    #[error("operation requires affine branches")]
    NonAffineInput,
    #[error("operation requires orientation-preserving branches")]
    OrientationReversing,
    #[error("base point {0} is not in the difference cover")]
    TZeroNotInDifference(f64),
    #[error("direct and tail estimators disagree: {direct} vs {tail}")]
    EstimatorMismatch { direct: f64, tail: f64 },
    #[error("floating-point expansion became ambiguous after {0} digits")]
    PrecisionExhausted(usize),
    #[error("integer overflow computing continuants; use the arbitrary-precision variant")]
    Overflow,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by exhausting a configured budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
