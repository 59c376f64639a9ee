//! Product and entangled states, measurements and evolutions relative to an
//! identification of C^4 with C^2 ⊗ C^2.
//!
//! Every verdict here is relative to an [`Isomorphism`]. The same vector or
//! operator can be product under one identification and entangled under another.
//!
//! Operator Schmidt decompositions use the reshuffle
//! `R[(i,i'),(j,j')] = T[(i,j),(i',j')]` with labels packed row-major
//! (`(i,j) -> 2i + j`). For `T = A ⊗ B` this gives `R = vec(A) vec(B)ᵀ`, a rank-one
//! matrix. For example `σz ⊗ σz = diag(1,-1,-1,1)` reshuffles to
//!
//! ```text
//! R = | 1  0  0 -1 |       vec(σz) = (1, 0, 0, -1)
//!     | 0  0  0  0 |
//!     | 0  0  0  0 |
//!     |-1  0  0  1 |
//! ```

mod evolution;
mod factorization;
mod iso;
mod schmidt;
mod search;

use thiserror::Error;

use crate::hilbert::LinalgError;
use crate::modelfit::ModelError;

pub use evolution::{
    evolution_between, is_product_evolution, overlap, states_equal_up_to_phase, Evolution,
};
pub use factorization::{check_factorization, FactorizationReport};
pub use iso::{canonical_iso_of, product_measurement, Isomorphism};
pub use schmidt::{
    measurement_entanglement_degree, operator_schmidt, operator_schmidt_general, reshuffle,
    schmidt_state, schmidt_state_with_tol, OperatorSchmidt, RankSummary, SchmidtDecomposition,
};
pub use search::{search_common_product_isomorphism, IsoSearchReport, DEFAULT_SEARCH_TRIALS};

/// A Schmidt coefficient counts toward the rank iff it exceeds `RANK_TOL * σ_max`.
pub const RANK_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("operator is not Hermitian (max |E - E†| = {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max |U†U - 1| = {0:.3e})")]
    NotUnitary(f64),
    #[error("basis is not orthonormal: Gram deviation {0:.3e}")]
    NotOrthonormal(f64),
    #[error("operator is zero")]
    ZeroOperator,
    #[error("expected a unit vector of dimension 4 (norm {0})")]
    NotUnit(f64),
    #[error("expected a 4x4 matrix, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
}
