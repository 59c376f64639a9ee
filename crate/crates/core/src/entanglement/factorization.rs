use serde::{Deserialize, Serialize};

use super::iso::unit4;
use super::{schmidt_state, EntanglementError, Isomorphism};
use crate::hilbert::{inner, CVec};
use crate::modelfit::{outcome_probabilities, ObservableModel};

/// Tolerance on `1 - |⟨x|y⟩|` when matching factor vectors across eigenvectors.
const FACTOR_MATCH_TOL: f64 = 1e-9;

/// Joint outcome probabilities against the product of marginals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    /// `|⟨eig_ij|state⟩|²` in the order 11, 12, 21, 22.
    pub joint: [f64; 4],
    pub state_is_product: bool,
    pub measurement_is_product: bool,
    /// Factor-space marginals `|⟨a_i|s_a⟩|²` and `|⟨b_j|s_b⟩|²`, present when the
    /// state and the measurement are both product.
    pub factor_marginals: Option<([f64; 2], [f64; 2])>,
    /// Marginals of `joint` over each side.
    pub joint_marginals: ([f64; 2], [f64; 2]),
    /// `max |p(Y_ij) - p(A_i) p(B_j)|`, using factor marginals when available.
    pub max_deviation: f64,
}

pub fn check_factorization(
    state: &CVec,
    m: &ObservableModel,
    iso: &Isomorphism,
) -> Result<FactorizationReport, EntanglementError> {
    unit4(state)?;
    let joint = outcome_probabilities(state, m);
    let joint_marginals = (
        [joint[0] + joint[1], joint[2] + joint[3]],
        [joint[0] + joint[2], joint[1] + joint[3]],
    );
    let s = schmidt_state(state, iso)?;
    let grid = product_grid(m, iso)?;
    let factor_marginals = match (&grid, s.is_product()) {
        (Some((a, b)), true) => {
            let (sa, sb) = (&s.left_factors[0], &s.right_factors[0]);
            let pa = [0, 1].map(|i| inner(&a[i], sa).unwrap().norm_sqr());
            let pb = [0, 1].map(|j| inner(&b[j], sb).unwrap().norm_sqr());
            Some((pa, pb))
        }
        _ => None,
    };
    let (pa, pb) = factor_marginals.unwrap_or(joint_marginals);
    let mut max_deviation: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            max_deviation = max_deviation.max((joint[2 * i + j] - pa[i] * pb[j]).abs());
        }
    }
    Ok(FactorizationReport {
        joint,
        state_is_product: s.is_product(),
        measurement_is_product: grid.is_some(),
        factor_marginals,
        joint_marginals,
        max_deviation,
    })
}

/// Factor bases `(a_1, a_2)`, `(b_1, b_2)` when every transported eigenvector
/// `ij` is `a_i ⊗ b_j` up to phase.
fn product_grid(m: &ObservableModel, iso: &Isomorphism) -> Result<Option<([CVec; 2], [CVec; 2])>, EntanglementError> {
    let mut lefts = Vec::with_capacity(4);
    let mut rights = Vec::with_capacity(4);
    for v in m.eigenvectors() {
        let d = schmidt_state(v, iso)?;
        if !d.is_product() {
            return Ok(None);
        }
        lefts.push(d.left_factors[0].clone());
        rights.push(d.right_factors[0].clone());
    }
    let same = |x: &CVec, y: &CVec| inner(x, y).unwrap().norm() >= 1.0 - FACTOR_MATCH_TOL;
    let grid = same(&lefts[0], &lefts[1])
        && same(&lefts[2], &lefts[3])
        && same(&rights[0], &rights[2])
        && same(&rights[1], &rights[3]);
    if !grid {
        return Ok(None);
    }
    Ok(Some((
        [lefts[0].clone(), lefts[2].clone()],
        [rights[0].clone(), rights[1].clone()],
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::random::{random_unit_vector, random_unitary};
    use crate::hilbert::tensor;
    use crate::modelfit::{synthesize, DEFAULT_EIGENVALUES};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn product_model(rng: &mut ChaCha8Rng, iso: &Isomorphism) -> ObservableModel {
        let (ua, ub) = (random_unitary(rng, 2), random_unitary(rng, 2));
        let mut vs = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                vs.push(iso.pull_back(&tensor(&ua.column(i), &ub.column(j)).unwrap()).unwrap());
            }
        }
        synthesize(&vs, DEFAULT_EIGENVALUES).unwrap()
    }

    #[test]
    fn product_state_and_measurement_factorize() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let iso = Isomorphism::from_unitary("r", random_unitary(&mut rng, 4)).unwrap();
        let m = product_model(&mut rng, &iso);
        let s = iso
            .pull_back(&tensor(&random_unit_vector(&mut rng, 2), &random_unit_vector(&mut rng, 2)).unwrap())
            .unwrap();
        let r = check_factorization(&s, &m, &iso).unwrap();
        assert!(r.state_is_product && r.measurement_is_product);
        assert!(r.max_deviation < 1e-10);
        let (pa, pb) = r.factor_marginals.unwrap();
        assert!((pa[0] - r.joint_marginals.0[0]).abs() < 1e-10);
        assert!((pb[1] - r.joint_marginals.1[1]).abs() < 1e-10);
    }

    #[test]
    fn singlet_does_not_factorize() {
        let iso = Isomorphism::canonical();
        let vs: Vec<CVec> = (0..4).map(|k| CVec::basis(4, k).unwrap()).collect();
        let m = synthesize(&vs, DEFAULT_EIGENVALUES).unwrap();
        let s = CVec::from_reals(&[0.0, 1.0, -1.0, 0.0]).unwrap().normalized().unwrap();
        let r = check_factorization(&s, &m, &iso).unwrap();
        assert!(!r.state_is_product && r.measurement_is_product);
        // joint (0, 1/2, 1/2, 0) against marginals (1/2, 1/2)
        assert!((r.max_deviation - 0.25).abs() < 1e-12);
    }

    #[test]
    fn entangled_basis_is_not_a_grid() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [
            [h, 0.0, 0.0, h],
            [h, 0.0, 0.0, -h],
            [0.0, h, h, 0.0],
            [0.0, h, -h, 0.0],
        ];
        let vs: Vec<CVec> = bell.iter().map(|r| CVec::from_reals(r).unwrap()).collect();
        let m = synthesize(&vs, DEFAULT_EIGENVALUES).unwrap();
        let r = check_factorization(&CVec::basis(4, 0).unwrap(), &m, &Isomorphism::canonical()).unwrap();
        assert!(!r.measurement_is_product);
        assert!(r.factor_marginals.is_none());
    }
}
