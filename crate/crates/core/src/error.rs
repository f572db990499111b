use thiserror::Error;

use crate::exprcore::{ExprError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid connection spec: {0}")]
    Spec(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("connection is not special: {0}")]
    NotSpecial(String),
    #[error("connections are not projectively equivalent: component {0}")]
    NotEquivalent(String),
    #[error("pole at the base point")]
    PoleAtBasePoint,
    #[error("pole on the integration path at t = {0}")]
    PoleOnPath(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("degenerate solution: det(sigma) vanishes at the base point")]
    DegenerateSigma,
    #[error("degenerate metric")]
    DegenerateMetric,
    #[error("dimension {0} is too small for this operation")]
    DimensionTooSmall(usize),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
