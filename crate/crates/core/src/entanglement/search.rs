use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{operator_schmidt, EntanglementError, Isomorphism};
use crate::hilbert::random::random_unitary;
use crate::hilbert::CMat;

pub const DEFAULT_SEARCH_TRIALS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoSearchReport {
    pub seed: u64,
    pub random_trials: usize,
    pub named_checked: Vec<String>,
    /// Number of operators rendered product by each named isomorphism.
    pub named_product_counts: Vec<usize>,
    /// Most operators rendered product simultaneously by any random trial.
    pub best_random_product_count: usize,
    /// Index of a trial, or name of an isomorphism, rendering every operator product.
    pub common_product: Option<String>,
}

impl IsoSearchReport {
    pub fn refuted(&self) -> bool {
        self.common_product.is_none()
    }
}

fn product_count(ops: &[CMat], iso: &Isomorphism, rank_tol: f64) -> Result<usize, EntanglementError> {
    let mut n = 0;
    for e in ops {
        if operator_schmidt(e, iso, rank_tol)?.is_product() {
            n += 1;
        }
    }
    Ok(n)
}

/// Looks for one isomorphism under which every operator in `ops` is product.
///
/// Tries each of `named`, then `trials` Haar-random isomorphisms. Trial `t` draws
/// from a ChaCha stream selected by `t`, so results do not depend on thread count.
pub fn search_common_product_isomorphism(
    ops: &[CMat],
    named: &[Isomorphism],
    trials: usize,
    seed: u64,
    rank_tol: f64,
) -> Result<IsoSearchReport, EntanglementError> {
    let named_product_counts = named
        .iter()
        .map(|iso| product_count(ops, iso, rank_tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut common_product = named
        .iter()
        .zip(&named_product_counts)
        .find(|(_, &c)| c == ops.len())
        .map(|(iso, _)| iso.name().to_string());

    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let iso = Isomorphism::from_unitary(format!("random #{t}"), random_unitary(&mut rng, 4))?;
            product_count(ops, &iso, rank_tol)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if common_product.is_none() {
        common_product = counts
            .iter()
            .position(|&c| c == ops.len())
            .map(|t| format!("random #{t}"));
    }
    Ok(IsoSearchReport {
        seed,
        random_trials: trials,
        named_checked: named.iter().map(|i| i.name().to_string()).collect(),
        named_product_counts,
        best_random_product_count: counts.into_iter().max().unwrap_or(0),
        common_product,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::RANK_TOL;
    use crate::hilbert::tensor_op;

    #[test]
    fn finds_canonical_for_local_operators() {
        let z = CMat::diag_real(&[1.0, -1.0]).unwrap();
        let one = CMat::identity(2).unwrap();
        let ops = vec![tensor_op(&z, &z).unwrap(), tensor_op(&z, &one).unwrap()];
        let r = search_common_product_isomorphism(&ops, &[Isomorphism::canonical()], 10, 1, RANK_TOL).unwrap();
        assert_eq!(r.common_product.as_deref(), Some("canonical"));
    }

    #[test]
    fn swap_and_zz_never_jointly_product_by_chance() {
        let z = CMat::diag_real(&[1.0, -1.0]).unwrap();
        let swap = CMat::from_fn(4, 4, |i, j| match (i, j) {
            (0, 0) | (3, 3) | (1, 2) | (2, 1) => 1.0.into(),
            _ => 0.0.into(),
        })
        .unwrap();
        let ops = vec![tensor_op(&z, &z).unwrap(), swap];
        let a = search_common_product_isomorphism(&ops, &[Isomorphism::canonical()], 200, 7, RANK_TOL).unwrap();
        assert!(a.refuted());
        assert_eq!(a.named_product_counts, vec![1]);
        let b = search_common_product_isomorphism(&ops, &[Isomorphism::canonical()], 200, 7, RANK_TOL).unwrap();
        assert_eq!(a, b);
    }
}
