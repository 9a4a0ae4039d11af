use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("joint distribution must have exactly 2 rows of equal, non-zero length ({0})")]
    Shape(String),

    #[error("entry ({row}, {col}) is not a finite number")]
    NonFinite { row: usize, col: usize },

    #[error("entry ({row}, {col}) is negative: {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("total probability mass is {sum}, expected 1 (strict policy)")]
    MassMismatch { sum: f64 },

    #[error("total probability mass is zero")]
    ZeroMass,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("infeasible problem: V(q_X, p_X) = {marginal_distance} exceeds eps = {eps}")]
    Infeasible { marginal_distance: f64, eps: f64 },

    #[error("brute-force search supports at most 3 columns, got {my}")]
    DimensionGuard { my: usize },

    #[error("counts table has zero total")]
    ZeroTotal,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
