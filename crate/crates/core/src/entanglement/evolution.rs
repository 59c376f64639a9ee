use super::iso::check_unitary;
use super::{operator_schmidt_general, EntanglementError, Isomorphism};
use crate::hilbert::{inner, CMat, CVec};
use crate::modelfit::ObservableModel;

/// Unitary sending one measurement's eigenbasis to another's.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub matrix: CMat,
    pub source: String,
    pub target: String,
}

impl Evolution {
    pub fn new(matrix: CMat, source: impl Into<String>, target: impl Into<String>) -> Result<Self, EntanglementError> {
        check_unitary(&matrix)?;
        Ok(Evolution {
            matrix,
            source: source.into(),
            target: target.into(),
        })
    }
}

/// `Σ_k |dst_k⟩⟨src_k|`, pairing eigenvectors by outcome position.
pub fn evolution_between(src: &ObservableModel, dst: &ObservableModel) -> Result<Evolution, EntanglementError> {
    let s = src.eigenbasis_matrix();
    let d = dst.eigenbasis_matrix();
    Evolution::new(
        &d * &s.adjoint(),
        src.labels().join(", "),
        dst.labels().join(", "),
    )
}

/// Operator Schmidt rank of `I U I⁻¹` equals 1.
pub fn is_product_evolution(u: &Evolution, iso: &Isomorphism, rank_tol: f64) -> Result<bool, EntanglementError> {
    Ok(operator_schmidt_general(&u.matrix, iso, rank_tol)?.rank == 1)
}

/// `|⟨u|v⟩|`.
pub fn overlap(u: &CVec, v: &CVec) -> Result<f64, EntanglementError> {
    Ok(inner(u, v)?.norm())
}

pub fn states_equal_up_to_phase(u: &CVec, v: &CVec, tol: f64) -> Result<bool, EntanglementError> {
    Ok(overlap(u, v)? >= 1.0 - tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::RANK_TOL;
    use crate::hilbert::random::{random_unit_vector, random_unitary};
    use crate::hilbert::{tensor_op, Complex64};
    use crate::modelfit::{synthesize, DEFAULT_EIGENVALUES};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn canonical_model(order: [usize; 4]) -> ObservableModel {
        let vs: Vec<CVec> = order.iter().map(|&k| CVec::basis(4, k).unwrap()).collect();
        synthesize(&vs, DEFAULT_EIGENVALUES).unwrap()
    }

    #[test]
    fn same_model_gives_identity() {
        let m = canonical_model([0, 1, 2, 3]);
        let u = evolution_between(&m, &m).unwrap();
        assert_eq!(u.matrix, CMat::identity(4).unwrap());
        assert!(is_product_evolution(&u, &Isomorphism::canonical(), RANK_TOL).unwrap());
    }

    #[test]
    fn permuted_basis_gives_permutation() {
        let u = evolution_between(&canonical_model([0, 1, 2, 3]), &canonical_model([1, 0, 3, 2])).unwrap();
        // swaps 11<->12 and 21<->22: the factor X on the second qubit
        for (i, j) in [(1, 0), (0, 1), (3, 2), (2, 3)] {
            assert_eq!(u.matrix.get(i, j), Complex64::new(1.0, 0.0));
        }
        assert!(is_product_evolution(&u, &Isomorphism::canonical(), RANK_TOL).unwrap());
        // 11<->22 alone is not a local map
        let v = evolution_between(&canonical_model([0, 1, 2, 3]), &canonical_model([3, 1, 2, 0])).unwrap();
        assert!(!is_product_evolution(&v, &Isomorphism::canonical(), RANK_TOL).unwrap());
    }

    #[test]
    fn local_unitary_evolution_is_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let iso = Isomorphism::from_unitary("r", random_unitary(&mut rng, 4)).unwrap();
        let local = tensor_op(&CMat::identity(2).unwrap(), &random_unitary(&mut rng, 2)).unwrap();
        let u = Evolution::new(iso.pull_back_op(&local).unwrap(), "B", "B'").unwrap();
        assert!(is_product_evolution(&u, &iso, RANK_TOL).unwrap());
    }

    #[test]
    fn phase_equality() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let v = random_unit_vector(&mut rng, 4);
        let w = v.scale(Complex64::from_polar(1.0, 2.3));
        assert!(states_equal_up_to_phase(&v, &w, 1e-12).unwrap());
        let (a, b) = (CVec::basis(4, 0).unwrap(), CVec::basis(4, 2).unwrap());
        assert!(!states_equal_up_to_phase(&a, &b, 1e-3).unwrap());
    }

    #[test]
    fn rejects_non_unitary() {
        let m = CMat::diag_real(&[1.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(matches!(Evolution::new(m, "a", "b"), Err(EntanglementError::NotUnitary(_))));
    }
}
