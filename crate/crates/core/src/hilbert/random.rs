//! Seeded random vectors and unitaries for property tests and optimizer starts.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{gram_schmidt, CMat, CVec};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniformly distributed unit vector in C^dim.
pub fn random_unit_vector(rng: &mut impl Rng, dim: usize) -> CVec {
    loop {
        let v = CVec::new((0..dim).map(|_| gaussian(rng)).collect()).expect("dimension 2 or 4");
        if let Ok(u) = v.normalized() {
            return u;
        }
    }
}

/// Haar-distributed unitary: Gram–Schmidt on complex Gaussian columns.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMat {
    loop {
        let cols: Vec<CVec> = (0..dim).map(|_| random_unit_vector(rng, dim)).collect();
        if let Ok(q) = gram_schmidt(&cols) {
            return CMat::from_columns(&q).expect("square");
        }
    }
}

/// Hermitian matrix with standard normal entries.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> CMat {
    let m = CMat::from_fn(dim, dim, |_, _| gaussian(rng)).expect("supported dimension");
    m.add(&m.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0))
}

/// Matrix with independent complex Gaussian entries.
pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> CMat {
    CMat::from_fn(dim, dim, |_, _| gaussian(rng)).expect("supported dimension")
}
