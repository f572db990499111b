//! Degree of mobility: parallel sections of the tampered connection.

pub mod jets;
pub mod linalg;
pub mod transport;

pub use jets::{degree_of_mobility, exact_solutions, JetSolution};
pub use transport::{parallel_transport, residual, NumericConnection};
