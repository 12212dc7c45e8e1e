//! Self-contained dense complex linear algebra.
//!
//! Arithmetic on pairs of `f64`, partial-pivoted solves, Cholesky-based
//! definiteness tests, and eigenvalue computations (shifted QR for general
//! matrices, cyclic Jacobi for Hermitian ones). No external numeric
//! dependency is used anywhere in this module; every tolerance is explicit.

mod chol;
mod eig;
mod matrix;
mod scalar;
mod solve;

pub use chol::{cholesky, is_positive_definite};
pub use eig::{eig_general, eig_hermitian};
pub use matrix::ComplexMatrix;
pub use scalar::Complex;
pub use solve::{sigma_min_estimate, solve};

use thiserror::Error;

/// Errors raised by the numeric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    /// A pivot fell below the singularity threshold during elimination.
    #[error("matrix is singular to working precision (pivot {pivot:.3e} at step {step})")]
    SingularMatrix { step: usize, pivot: f64 },
    /// The QR iteration hit its cap without isolating every eigenvalue.
    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    /// An operation requiring a Hermitian input received one that fails the
    /// Hermitian tolerance check.
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
}
