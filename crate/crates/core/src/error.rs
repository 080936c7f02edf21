use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: String, value: f64 },
    #[error("vertex `{0}` is isolated")]
    IsolatedVertex(String),
    #[error("transition matrix is not reversible at ({0}, {1})")]
    NotReversible(usize, usize),
    #[error("invalid transition matrix: {0}")]
    InvalidTransition(String),
    #[error("graph has no boundary vertices")]
    EmptyBoundary,
    #[error("graph has no interior vertices")]
    EmptyInterior,
    #[error("operation requires a closed graph (empty boundary)")]
    NotClosed,
    #[error("exponent {0} is outside the allowed range")]
    BadExponent(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration over {size} vertices exceeds the cap of {cap}; pass force to override")]
    EnumerationCap { size: usize, cap: usize },
    #[error("value vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("flow infeasible: set is not a (1+c)-magnifier for the requested c")]
    InfeasibleFlow,
    #[error("isoperimetric hypothesis fails on set {witness:?} (area {area}, required {required})")]
    HypothesisViolated {
        witness: Vec<String>,
        area: f64,
        required: f64,
    },
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("no valid multipliers within the search cap")]
    NoMultipliers,
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
