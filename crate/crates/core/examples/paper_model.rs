//! Reproducing the reference tables from the built-in state and measurements,
//! then checking factorization and the evolutions between measurements.

use bellkit::bellstats::{expectation, Experiment};
use bellkit::entanglement::{
    canonical_iso_of, check_factorization, evolution_between, is_product_evolution, Isomorphism, RANK_TOL,
};
use bellkit::modelfit::{paper_fixture, probabilities_from_model};

fn main() {
    let f = paper_fixture();
    let state = f.state.vector();
    for exp in Experiment::ALL {
        let m = f.model(exp);
        let model = probabilities_from_model(&f.state, m);
        let data = f.dataset.table(exp);
        println!(
            "{:<4} model {:.3?} data {:.3?} E {:+.3} vs {:+.3}",
            exp.label(),
            model.probs(),
            data.probs(),
            expectation(&model),
            expectation(data)
        );
        let own = canonical_iso_of(m).unwrap();
        for iso in [Isomorphism::canonical(), own] {
            let r = check_factorization(state, m, &iso).unwrap();
            println!(
                "     {:<24.24} state product {} measurement product {} max deviation {:.2e}",
                iso.name(),
                r.state_is_product,
                r.measurement_is_product,
                r.max_deviation
            );
        }
    }

    let ab = f.model(Experiment::AB);
    for exp in [Experiment::ABp, Experiment::ApB, Experiment::ApBp] {
        let u = evolution_between(ab, f.model(exp)).unwrap();
        let iso = canonical_iso_of(ab).unwrap();
        println!("AB -> {:<4} product evolution: {}", exp.label(), is_product_evolution(&u, &iso, RANK_TOL).unwrap());
    }
}
