//! Metrizability of projective structures.
//!
//! Given a torsion-free affine connection on a coordinate chart, decide whether
//! its projective class contains a Levi-Civita connection. The metrizability
//! equation is prolonged to a linear connection on
//! `⊙²TM ⊕ TM ⊕ ℝ`; its parallel sections are found by exact jet recursion and
//! turned back into metrics, which are then verified.

pub mod cli;
pub mod error;
pub mod exprcore;
pub mod metricize;
pub mod mobility;
pub mod projconn;
pub mod tensorfield;
pub mod tractor;

pub use error::{Error, Result};
