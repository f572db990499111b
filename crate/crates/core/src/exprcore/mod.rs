//! Exact scalar arithmetic: rational functions over ℚ, truncated Taylor series,
//! differential forms with the Poincaré homotopy, and the expression parser.

pub mod forms;
pub mod gcd;
pub mod parse;
pub mod poly;
pub mod ratfn;
pub mod scalar;
pub mod series;

use thiserror::Error;

pub use forms::DifferentialForm;
pub use parse::{default_vars, parse_expr, parse_rational, ParseError};
pub use poly::{fmt_q, q_to_f64, Monomial, Poly, MAX_VARS};
pub use ratfn::RationalExpr;
pub use scalar::Scalar;
pub use series::Series;

/// Exact rationals.
pub type Q = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("form is not closed")]
    NotClosed,
    #[error("form has non-polynomial components")]
    NotPolynomial,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Shorthand for `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Shorthand for an integer as an exact rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}
