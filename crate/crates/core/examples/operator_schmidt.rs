//! Operator Schmidt coefficients and entanglement degree of measurements.

use bellkit::entanglement::{canonical_iso_of, measurement_entanglement_degree, operator_schmidt, Isomorphism, RANK_TOL};
use bellkit::hilbert::{tensor_op, CMat, Complex64};
use bellkit::modelfit::paper_fixture;
use bellkit::bellstats::Experiment;

fn main() {
    let x = CMat::from_fn(2, 2, |i, j| Complex64::new(if i != j { 1.0 } else { 0.0 }, 0.0)).unwrap();
    let z = CMat::diag_real(&[1.0, -1.0]).unwrap();
    let zz = tensor_op(&z, &z).unwrap();
    let xx_zz = tensor_op(&x, &x).unwrap().add(&zz).unwrap();
    let canonical = Isomorphism::canonical();
    for (name, e) in [("Z⊗Z", &zz), ("X⊗X + Z⊗Z", &xx_zz)] {
        let d = operator_schmidt(e, &canonical, RANK_TOL).unwrap();
        println!("{name:<12} coefficients {:.4?} rank {} degree {:.4}", d.coefficients, d.rank, d.degree());
    }

    // the fixture's measurements, each under the canonical isomorphism and its own
    let f = paper_fixture();
    for exp in Experiment::ALL {
        let m = f.model(exp);
        let own = canonical_iso_of(m).unwrap();
        println!(
            "{:<4} degree canonical {:.4}, own {:.2e}",
            exp.label(),
            measurement_entanglement_degree(m.operator(), &canonical).unwrap(),
            measurement_entanglement_degree(m.operator(), &own).unwrap()
        );
    }
}
