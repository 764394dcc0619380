//! Dense complex linear algebra used by every other module.

mod eig;
mod lu;
mod matrix;
mod roots;
mod span;

use thiserror::Error;

pub use eig::{herm_eig, kernel_basis, operator_norm, psd_sqrt, HermEig};
pub use lu::{det, inv_resolvent, inverse};
pub use matrix::{inner, vec_norm, CMatrix, C64, ONE, ZERO};
pub use roots::{charpoly, eigenvalues_general, horner, poly_roots};
pub use span::{range_onb, unitary_completion, unitary_completion_ordered};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("frames are not isometric (Gram residual {gram_residual:e})")]
    NotIsometric { gram_residual: f64 },
    #[error("completion order is not a permutation of the ambient basis")]
    InvalidOrder,
    #[error("leading coefficient is zero")]
    DegenerateLeadingCoefficient,
    #[error("matrix is singular")]
    Singular,
    #[error("resolvent I - D E(z) is singular")]
    SingularResolvent,
}
