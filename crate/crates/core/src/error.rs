use thiserror::Error;

use crate::exactalg::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular")]
    Singular,

    #[error("zero pivot at ({row}, {col})")]
    ZeroPivot { row: usize, col: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix has rank {found}, expected full row rank {expected}")]
    RankDeficient { found: usize, expected: usize },

    #[error("{formula} formula is not valid here (deg = {deg}, ord = {ord})")]
    FormulaInvalid {
        formula: &'static str,
        deg: Box<Rational>,
        ord: Box<Rational>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("cone has a zero generator")]
    DegenerateCone,

    #[error("denominator vanishes at the evaluation point")]
    EvaluationPoint,

    #[error("no admissible evaluation point after {0} attempts")]
    PointsExhausted(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
