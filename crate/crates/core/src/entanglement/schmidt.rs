use serde::{Deserialize, Serialize};

use super::iso::{check_square4, unit4};
use super::{EntanglementError, Isomorphism, RANK_TOL};
use crate::hilbert::{svd, CMat, CVec, DEFAULT_TOL};

/// `I v = Σ_k σ_k left_k ⊗ right_k`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: [f64; 2],
    pub left_factors: [CVec; 2],
    pub right_factors: [CVec; 2],
    pub rank: usize,
}

impl SchmidtDecomposition {
    pub fn is_product(&self) -> bool {
        self.rank == 1
    }
}

/// `I T I⁻¹ = Σ_k σ_k A_k ⊗ B_k` with Hilbert–Schmidt orthonormal `A_k`, `B_k`.
#[derive(Clone, Debug)]
pub struct OperatorSchmidt {
    pub coefficients: [f64; 4],
    pub left_ops: Vec<CMat>,
    pub right_ops: Vec<CMat>,
    pub rank: usize,
}

impl OperatorSchmidt {
    pub fn is_product(&self) -> bool {
        self.rank == 1
    }

    /// `1 - σ₁² / Σ σ_k²`.
    pub fn degree(&self) -> f64 {
        let total: f64 = self.coefficients.iter().map(|s| s * s).sum();
        (1.0 - self.coefficients[0].powi(2) / total).max(0.0)
    }
}

/// Verdict summary shared by reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub product: bool,
}

pub fn schmidt_state(v: &CVec, iso: &Isomorphism) -> Result<SchmidtDecomposition, EntanglementError> {
    schmidt_state_with_tol(v, iso, RANK_TOL)
}

pub fn schmidt_state_with_tol(
    v: &CVec,
    iso: &Isomorphism,
    rank_tol: f64,
) -> Result<SchmidtDecomposition, EntanglementError> {
    unit4(v)?;
    let w = iso.apply(v)?;
    let c = CMat::from_fn(2, 2, |i, j| w.get(2 * i + j))?;
    let dec = svd(&c)?;
    let col = |m: &CMat, k: usize| m.column(k);
    Ok(SchmidtDecomposition {
        coefficients: [dec.singular_values[0], dec.singular_values[1]],
        left_factors: [col(&dec.left, 0), col(&dec.left, 1)],
        right_factors: [col(&dec.right, 0).conj(), col(&dec.right, 1).conj()],
        rank: dec.rank(rank_tol),
    })
}

/// `R[(2i+i'),(2j+j')] = T[(2i+j),(2i'+j')]`.
pub fn reshuffle(t: &CMat) -> Result<CMat, EntanglementError> {
    check_square4(t)?;
    Ok(CMat::from_fn(4, 4, |r, c| {
        let (i, ip) = (r / 2, r % 2);
        let (j, jp) = (c / 2, c % 2);
        t.get(2 * i + j, 2 * ip + jp)
    })?)
}

/// Operator Schmidt decomposition of a Hermitian operator.
pub fn operator_schmidt(
    e: &CMat,
    iso: &Isomorphism,
    rank_tol: f64,
) -> Result<OperatorSchmidt, EntanglementError> {
    check_square4(e)?;
    let dev = e.max_abs_diff(&e.adjoint())?;
    if dev > DEFAULT_TOL * (1.0 + e.max_abs()) {
        return Err(EntanglementError::NotHermitian(dev));
    }
    operator_schmidt_general(e, iso, rank_tol)
}

/// Operator Schmidt decomposition of any 4x4 operator.
pub fn operator_schmidt_general(
    t: &CMat,
    iso: &Isomorphism,
    rank_tol: f64,
) -> Result<OperatorSchmidt, EntanglementError> {
    let moved = iso.transport(t)?;
    let dec = svd(&reshuffle(&moved)?)?;
    if dec.singular_values[0] == 0.0 {
        return Err(EntanglementError::ZeroOperator);
    }
    let factor = |m: &CMat, k: usize, conj: bool| {
        let v = m.column(k);
        let v = if conj { v.conj() } else { v };
        CMat::from_fn(2, 2, |i, ip| v.get(2 * i + ip)).unwrap()
    };
    let mut coefficients = [0.0; 4];
    coefficients.copy_from_slice(&dec.singular_values);
    Ok(OperatorSchmidt {
        coefficients,
        left_ops: (0..4).map(|k| factor(&dec.left, k, false)).collect(),
        right_ops: (0..4).map(|k| factor(&dec.right, k, true)).collect(),
        rank: dec.rank(rank_tol),
    })
}

/// `1 - σ₁²/Σσ²` of the operator Schmidt coefficients: 0 exactly for product
/// measurements. One admissible quantifier among many.
pub fn measurement_entanglement_degree(e: &CMat, iso: &Isomorphism) -> Result<f64, EntanglementError> {
    Ok(operator_schmidt(e, iso, RANK_TOL)?.degree())
}
