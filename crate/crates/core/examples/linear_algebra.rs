//! The complex linear algebra underneath: SVD, Hermitian eigensolver, exponentials,
//! and repair of bases read from rounded values.

use bellkit::hilbert::random::{random_hermitian, random_matrix};
use bellkit::hilbert::{eigh, expm, orthonormality_defect, repair_basis, svd, CVec, Complex64, RoundingPrecision};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    let m = random_matrix(&mut rng, 4);
    let s = svd(&m).unwrap();
    let rebuilt = &(&s.left * &bellkit::hilbert::CMat::diag_real(&s.singular_values).unwrap()) * &s.right.adjoint();
    println!("singular values {:.4?}, reconstruction error {:.1e}", s.singular_values, rebuilt.max_abs_diff(&m).unwrap());

    let h = random_hermitian(&mut rng, 4);
    let e = eigh(&h).unwrap();
    println!("eigenvalues {:.4?}", e.values);
    let u = expm(&h.scale(Complex64::i())).unwrap();
    println!("exp(iH) unitary: {}", u.is_unitary(1e-10));

    // a basis printed to two decimals in amplitude and phase
    let printed = [
        [(0.71, 0.0), (0.0, 0.0), (0.0, 0.0), (0.71, 0.0)],
        [(0.71, 0.0), (0.0, 0.0), (0.0, 0.0), (0.71, 180.0)],
        [(0.0, 0.0), (0.71, 0.0), (0.71, 0.0), (0.0, 0.0)],
        [(0.0, 0.0), (0.71, 0.0), (0.71, 180.0), (0.0, 0.0)],
    ];
    let vs: Vec<CVec> = printed.iter().map(|p| CVec::from_polar_deg(p).unwrap()).collect();
    let (defect, at) = orthonormality_defect(&vs).unwrap();
    let fixed = repair_basis(&vs, RoundingPrecision::default()).unwrap();
    let (after, _) = orthonormality_defect(&fixed.vectors).unwrap();
    println!("defect {defect:.2e} at {at:?} -> {after:.1e} via {:?}, max shift {:.4}", fixed.method, fixed.max_shift);
}
