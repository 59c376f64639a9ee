//! Schmidt decomposition of two-qubit states under different isomorphisms.

use bellkit::entanglement::{schmidt_state, Isomorphism};
use bellkit::hilbert::{CMat, CVec, Complex64};

fn show(name: &str, v: &CVec, iso: &Isomorphism) {
    let d = schmidt_state(v, iso).unwrap();
    println!(
        "{name:<10} under {:<10} coefficients [{:.4}, {:.4}] rank {} product {}",
        iso.name(),
        d.coefficients[0],
        d.coefficients[1],
        d.rank,
        d.is_product()
    );
}

fn main() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = CVec::from_reals(&[h, 0.0, 0.0, h]).unwrap();
    let product = CVec::from_reals(&[0.5, 0.5, 0.5, 0.5]).unwrap();
    let canonical = Isomorphism::canonical();
    show("bell", &bell, &canonical);
    show("product", &product, &canonical);

    // an isomorphism whose first basis vector is the Bell state makes it a product
    let c = |x: f64| Complex64::new(x, 0.0);
    let u = CMat::new(
        4,
        4,
        vec![
            c(h), c(0.0), c(0.0), c(h),
            c(0.0), c(1.0), c(0.0), c(0.0),
            c(0.0), c(0.0), c(1.0), c(0.0),
            c(h), c(0.0), c(0.0), c(-h),
        ],
    )
    .unwrap();
    let bell_basis = Isomorphism::from_unitary("bell-first", u).unwrap();
    show("bell", &bell, &bell_basis);
    show("product", &product, &bell_basis);
}
