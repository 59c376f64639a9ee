use super::EntanglementError;
use crate::hilbert::{coordinate_map, orthonormality_defect, tensor, tensor_op, CMat, CVec, DEFAULT_TOL};
use crate::modelfit::{synthesize, ObservableModel};

/// Identification of an orthonormal basis `x_11, x_12, x_21, x_22` of C^4 with
/// the product basis `c_i ⊗ d_j`.
///
/// Stored as the unitary `M` with `M x_ij = e_(2i+j)`; its rows are the
/// conjugated basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Isomorphism {
    name: String,
    matrix: CMat,
}

impl Isomorphism {
    /// The standard basis of C^4 read as the product basis.
    pub fn canonical() -> Self {
        Isomorphism {
            name: "canonical".into(),
            matrix: CMat::identity(4).unwrap(),
        }
    }

    /// `basis[k]` is sent to the `k`-th product vector in the order 11, 12, 21, 22.
    pub fn from_basis(name: impl Into<String>, basis: &[CVec]) -> Result<Self, EntanglementError> {
        if basis.len() != 4 || basis.iter().any(|v| v.dim() != 4) {
            return Err(EntanglementError::NotOrthonormal(f64::NAN));
        }
        let (defect, _) = orthonormality_defect(basis)?;
        if defect > DEFAULT_TOL {
            return Err(EntanglementError::NotOrthonormal(defect));
        }
        Ok(Isomorphism {
            name: name.into(),
            matrix: coordinate_map(basis)?,
        })
    }

    /// `u` maps C^4 onto the product coordinates.
    pub fn from_unitary(name: impl Into<String>, u: CMat) -> Result<Self, EntanglementError> {
        check_unitary(&u)?;
        Ok(Isomorphism {
            name: name.into(),
            matrix: u,
        })
    }

    /// `(ua ⊗ ub) ∘ self`: the same identification followed by local unitaries.
    pub fn compose_local(&self, ua: &CMat, ub: &CMat) -> Result<Self, EntanglementError> {
        let local = tensor_op(ua, ub)?;
        check_unitary(&local)?;
        Ok(Isomorphism {
            name: format!("{} (local)", self.name),
            matrix: &local * &self.matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Basis vector of C^4 identified with the product label `k` (0..4).
    pub fn basis_vector(&self, k: usize) -> CVec {
        self.matrix.row(k).conj()
    }

    /// Coefficients of `I v` in the product basis.
    pub fn apply(&self, v: &CVec) -> Result<CVec, EntanglementError> {
        Ok(self.matrix.apply(v)?)
    }

    /// `I⁻¹ w`.
    pub fn pull_back(&self, w: &CVec) -> Result<CVec, EntanglementError> {
        Ok(self.matrix.adjoint().apply(w)?)
    }

    /// `I E I⁻¹` as a matrix on the product basis.
    pub fn transport(&self, e: &CMat) -> Result<CMat, EntanglementError> {
        check_square4(e)?;
        Ok(&(&self.matrix * e) * &self.matrix.adjoint())
    }

    /// `I⁻¹ T I`.
    pub fn pull_back_op(&self, t: &CMat) -> Result<CMat, EntanglementError> {
        check_square4(t)?;
        Ok(&(&self.matrix.adjoint() * t) * &self.matrix)
    }
}

/// Measurement with eigenvectors `I⁻¹(a_i ⊗ b_j)` in the order 11, 12, 21, 22,
/// where `a_i`, `b_j` are the columns of the 2x2 unitaries `a`, `b`.
pub fn product_measurement(
    iso: &Isomorphism,
    a: &CMat,
    b: &CMat,
    eigenvalues: [f64; 4],
) -> Result<ObservableModel, EntanglementError> {
    check_unitary(a)?;
    check_unitary(b)?;
    let mut vs = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            vs.push(iso.pull_back(&tensor(&a.column(i), &b.column(j))?)?);
        }
    }
    Ok(synthesize(&vs, eigenvalues)?)
}

/// The isomorphism sending the model's eigenvectors to 11, 12, 21, 22 in order.
pub fn canonical_iso_of(m: &ObservableModel) -> Result<Isomorphism, EntanglementError> {
    let name = format!("from-model[{}]", m.labels().join(", "));
    Isomorphism::from_basis(name, m.eigenvectors())
}

pub(super) fn check_square4(m: &CMat) -> Result<(), EntanglementError> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(EntanglementError::Shape {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

pub(super) fn check_unitary(u: &CMat) -> Result<(), EntanglementError> {
    if !u.is_square() {
        return Err(EntanglementError::Shape {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let n = u.rows();
    let dev = (&u.adjoint() * u).max_abs_diff(&CMat::identity(n)?)?;
    if dev > DEFAULT_TOL {
        return Err(EntanglementError::NotUnitary(dev));
    }
    Ok(())
}

pub(super) fn unit4(v: &CVec) -> Result<(), EntanglementError> {
    if v.dim() != 4 || !v.is_unit(DEFAULT_TOL) {
        return Err(EntanglementError::NotUnit(v.norm()));
    }
    Ok(())
}
