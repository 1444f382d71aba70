use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        range: String,
    },

    #[error("generator index {index} is invalid for a generating set of size {size}")]
    InvalidGenerator { index: usize, size: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ball exceeded the element budget of {budget} at radius {radius}")]
    BudgetExceeded { budget: usize, radius: u32 },

    #[error("closure did not stabilise within {0} rounds")]
    ClosureBudget(usize),

    #[error("graded piece of weight {weight} has torsion (elementary divisors {divisors:?})")]
    Torsion { weight: usize, divisors: Vec<String> },

    #[error("relation pivot {pivot} at coordinate {coord} is not a unit")]
    NonUnitPivot { coord: usize, pivot: String },

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("monodromy is not unipotent on the abelianization")]
    NotUnipotent,

    #[error("lower central series did not terminate within the bound {bound}")]
    ClassBoundExceeded { bound: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("series grows exponentially (rate {0:.4}); no polynomial degree")]
    ExponentialSeries(f64),

    #[error("fit residual {residual:.4} exceeds threshold {threshold}")]
    FitRejected { residual: f64, threshold: f64 },

    #[error("unknown length mode `{0}`")]
    UnknownMode(String),

    #[error("subgroup is not invariant under the automorphism")]
    NotInvariant,

    #[error("subgroup has infinite index")]
    InfiniteIndex,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
