//! Complex linear algebra in dimensions 2 and 4.

mod basis;
mod matrix;
pub mod random;
mod svd;
mod vector;

use thiserror::Error;

pub use basis::{
    coordinate_map, gram_schmidt, orthonormality_defect, repair_basis, BasisRepair, RepairMethod,
    RoundingPrecision,
};
pub use matrix::{expm, gram, tensor_op, CMat};
pub use num_complex::Complex64;
pub use svd::{eigh, svd, Eigh, SvdResult};
pub use vector::{inner, tensor, CVec, Polar};

/// Default entrywise tolerance for complex comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |M - M†| = {0:.3e})")]
    NotHermitian(f64),
    #[error("empty input")]
    Empty,
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("vectors are linearly dependent")]
    LinearlyDependent,
    #[error("Jacobi SVD did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },
}
