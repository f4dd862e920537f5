//! Exact Gaussian-rational scalars and dense linear algebra.

pub(crate) mod gauss;
mod elim;
mod inertia;
mod matrix;
mod modular;
mod scalar;

pub use elim::{
    column_basis, completion_basis, determinant, extend_to_basis, inverse, is_nonsingular, nullspace,
    rank, rref, rref_rank_nullspace, solve,
};
pub use inertia::hermitian_inertia;
pub use matrix::{Kind, Matrix};
pub use scalar::{rat_sqrt, Field, GaussianRational, ParseScalarError};
pub(crate) use scalar::rat_to_f64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactMatError {
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("bad input: {0}")]
    BadInput(String),
}
