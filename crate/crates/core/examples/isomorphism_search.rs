//! Searching for one isomorphism that renders every measurement product.

use bellkit::bellstats::Experiment;
use bellkit::entanglement::{canonical_iso_of, search_common_product_isomorphism, Isomorphism, RANK_TOL};
use bellkit::hilbert::CMat;
use bellkit::modelfit::paper_fixture;

fn main() {
    let f = paper_fixture();
    let ops: Vec<CMat> = Experiment::ALL.iter().map(|&e| f.model(e).operator().clone()).collect();
    let mut named = vec![Isomorphism::canonical()];
    named.extend(Experiment::ALL.iter().map(|&e| canonical_iso_of(f.model(e)).unwrap()));

    let r = search_common_product_isomorphism(&ops, &named, 2_000, 1, RANK_TOL).unwrap();
    for (name, count) in r.named_checked.iter().zip(&r.named_product_counts) {
        println!("{name:<40.40} renders {count} of {} product", ops.len());
    }
    println!("best random trial: {} of {}", r.best_random_product_count, ops.len());
    match &r.common_product {
        Some(name) => println!("common product isomorphism: {name}"),
        None => println!("no common product isomorphism found in {} trials", r.random_trials),
    }
}
