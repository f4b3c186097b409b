//! Exact scalars and matrices over Q, F_p, Z and Z/n, and the K-group value
//! types used by every invariant in the crate.

mod kclass;
mod matrix;
mod ring;
mod scalar;
mod sparse;

use thiserror::Error;

pub use kclass::{k1_eq, k1_inv, k1_mul, k1_project_quotient, tau, K0Class, K1Class, K1QuotClass};
pub use matrix::Matrix;
pub use ring::{is_prime, RingSpec};
pub use scalar::{Scalar, Value};
pub use sparse::SparseMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(RingSpec, RingSpec),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("determinant is not a unit")]
    NotInvertible,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
}

pub type ExactResult<T> = Result<T, ExactError>;

/// Free-function form of [`Matrix::det`].
pub fn det(m: &Matrix) -> ExactResult<Scalar> {
    m.det()
}

/// Free-function form of [`Matrix::inverse`].
pub fn inverse(m: &Matrix) -> ExactResult<Matrix> {
    m.inverse()
}

/// Free-function form of [`Matrix::block_direct_sum`].
pub fn block_direct_sum(a: &Matrix, b: &Matrix) -> ExactResult<Matrix> {
    a.block_direct_sum(b)
}

/// K₁ class of an invertible matrix.
pub fn k1_of(m: &Matrix) -> ExactResult<K1Class> {
    K1Class::new(m.det()?)
}
