//! Seeded property tests over random states, unitaries and measurements.

use bellkit::bellstats::{chsh, CoincidenceTable, Experiment, ExperimentDataset, TSIRELSON_BOUND};
use bellkit::cli::schema::{to_canonical_json, DatasetFile, StateFile};
use bellkit::cli::verify::ProductScenario;
use bellkit::entanglement::{
    canonical_iso_of, check_factorization, evolution_between, is_product_evolution, operator_schmidt,
    product_measurement, schmidt_state, Isomorphism, RANK_TOL,
};
use bellkit::hilbert::random::{random_hermitian, random_matrix, random_unit_vector, random_unitary};
use bellkit::hilbert::{eigh, expm, inner, svd, tensor, tensor_op, CMat, CVec, Complex64};
use bellkit::modelfit::{
    expectation_from_model, outcome_probabilities, probabilities_from_model, ObservableModel, Provenance,
    StateVector, DEFAULT_EIGENVALUES,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_iso(r: &mut ChaCha8Rng) -> Isomorphism {
    Isomorphism::from_unitary("random", random_unitary(r, 4)).unwrap()
}

fn eigenvalue_pattern() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(prop::bool::ANY).prop_map(|s| s.map(|b| if b { 1.0 } else { -1.0 }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn svd_reconstructs_with_unitary_factors(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 4])) {
        let m = random_matrix(&mut rng(seed), n);
        let d = svd(&m).unwrap();
        prop_assert!(d.reconstruct().max_abs_diff(&m).unwrap() < 1e-10);
        prop_assert!(d.left.is_unitary(1e-10) && d.right.is_unitary(1e-10));
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(d.singular_values.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn frobenius_norm_is_singular_value_norm(seed in any::<u64>()) {
        let m = random_matrix(&mut rng(seed), 4);
        let s2: f64 = svd(&m).unwrap().singular_values.iter().map(|s| s * s).sum();
        prop_assert!((s2 - m.frobenius_norm_sqr()).abs() < 1e-10 * (1.0 + s2));
    }

    #[test]
    fn exponential_of_skew_hermitian_is_unitary(seed in any::<u64>(), scale in 0.01f64..20.0) {
        let h = random_hermitian(&mut rng(seed), 4).scale(Complex64::new(0.0, scale));
        prop_assert!(expm(&h).unwrap().is_unitary(1e-9));
    }

    #[test]
    fn eigh_diagonalizes(seed in any::<u64>()) {
        let h = random_hermitian(&mut rng(seed), 4);
        let e = eigh(&h).unwrap();
        let d = CMat::diag_real(&e.values).unwrap();
        let back = &(&e.vectors * &d) * &e.vectors.adjoint();
        prop_assert!(back.max_abs_diff(&h).unwrap() < 1e-9);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (u, v) = (random_unit_vector(&mut r, 4), random_unit_vector(&mut r, 4));
        prop_assert!((inner(&u, &v).unwrap() - inner(&v, &u).unwrap().conj()).norm() < 1e-14);
    }

    #[test]
    fn tensor_norm_is_multiplicative(seed in any::<u64>(), a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let mut r = rng(seed);
        let u = random_unit_vector(&mut r, 2).scale(Complex64::new(a, 0.0));
        let v = random_unit_vector(&mut r, 2).scale(Complex64::new(b, 0.0));
        prop_assert!((tensor(&u, &v).unwrap().norm() - a * b).abs() < 1e-12);
    }

    #[test]
    fn isomorphisms_preserve_inner_products(seed in any::<u64>()) {
        let mut r = rng(seed);
        let iso = random_iso(&mut r);
        let (u, v) = (random_unit_vector(&mut r, 4), random_unit_vector(&mut r, 4));
        let before = inner(&u, &v).unwrap();
        let after = inner(&iso.apply(&u).unwrap(), &iso.apply(&v).unwrap()).unwrap();
        prop_assert!((before - after).norm() < 1e-12);
        prop_assert!(iso.pull_back(&iso.apply(&u).unwrap()).unwrap().max_abs_diff(&u).unwrap() < 1e-12);
    }

    #[test]
    fn schmidt_coefficients_form_a_distribution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = schmidt_state(&random_unit_vector(&mut r, 4), &random_iso(&mut r)).unwrap();
        let total: f64 = d.coefficients.iter().map(|s| s * s).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!(d.coefficients[0] >= d.coefficients[1]);
    }

    #[test]
    fn product_state_iff_rank_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let iso = random_iso(&mut r);
        let (a, b) = (random_unit_vector(&mut r, 2), random_unit_vector(&mut r, 2));
        let product = iso.pull_back(&tensor(&a, &b).unwrap()).unwrap();
        prop_assert!(schmidt_state(&product, &iso).unwrap().is_product());
        // a Haar-random state is entangled with probability one
        prop_assert!(!schmidt_state(&random_unit_vector(&mut r, 4), &iso).unwrap().is_product());
    }

    #[test]
    fn local_unitaries_keep_schmidt_coefficients(seed in any::<u64>()) {
        let mut r = rng(seed);
        let iso = random_iso(&mut r);
        let moved = iso.compose_local(&random_unitary(&mut r, 2), &random_unitary(&mut r, 2)).unwrap();
        let v = random_unit_vector(&mut r, 4);
        let (x, y) = (schmidt_state(&v, &iso).unwrap(), schmidt_state(&v, &moved).unwrap());
        for k in 0..2 {
            prop_assert!((x.coefficients[k] - y.coefficients[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn operator_schmidt_reconstructs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let iso = random_iso(&mut r);
        let e = random_hermitian(&mut r, 4);
        let d = operator_schmidt(&e, &iso, RANK_TOL).unwrap();
        let mut sum = CMat::zeros(4, 4).unwrap();
        for k in 0..d.left_ops.len() {
            let term = tensor_op(&d.left_ops[k], &d.right_ops[k]).unwrap();
            sum = sum.add(&term.scale(Complex64::new(d.coefficients[k], 0.0))).unwrap();
        }
        prop_assert!(sum.max_abs_diff(&iso.transport(&e).unwrap()).unwrap() < 1e-9);
        let s2: f64 = d.coefficients.iter().map(|s| s * s).sum();
        prop_assert!((s2 - e.frobenius_norm_sqr()).abs() < 1e-9 * (1.0 + s2));
        prop_assert!((0.0..=0.75 + 1e-12).contains(&d.degree()));
    }

    #[test]
    fn product_state_and_measurement_factorize(seed in any::<u64>()) {
        let mut r = rng(seed);
        let iso = random_iso(&mut r);
        let state = iso.pull_back(&tensor(&random_unit_vector(&mut r, 2), &random_unit_vector(&mut r, 2)).unwrap()).unwrap();
        let m = product_measurement(&iso, &random_unitary(&mut r, 2), &random_unitary(&mut r, 2), DEFAULT_EIGENVALUES).unwrap();
        let f = check_factorization(&state, &m, &iso).unwrap();
        prop_assert!(f.state_is_product && f.measurement_is_product);
        prop_assert!(f.max_deviation < 1e-10);
    }

    #[test]
    fn product_measurements_share_marginals_and_product_evolutions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sc = ProductScenario::random(&mut r);
        let ds = sc.dataset();
        let c = chsh(&ds);
        prop_assert!(c.max_marginal_deviation() < 1e-10);
        for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)] {
            let u = evolution_between(&sc.models[i], &sc.models[j]).unwrap();
            prop_assert!(is_product_evolution(&u, &sc.iso, RANK_TOL).unwrap());
        }
    }

    #[test]
    fn each_measurement_is_product_under_its_own_isomorphism(seed in any::<u64>(), values in eigenvalue_pattern()) {
        let m = ObservableModel::from_unitary(&random_unitary(&mut rng(seed), 4), values).unwrap();
        let iso = canonical_iso_of(&m).unwrap();
        let product = operator_schmidt(m.operator(), &iso, RANK_TOL).unwrap().is_product();
        prop_assert_eq!(product, is_product_pattern(values));
    }

    #[test]
    fn chsh_never_exceeds_tsirelson(seed in any::<u64>()) {
        let sc = ProductScenario::random(&mut rng(seed));
        prop_assert!(chsh(&sc.dataset()).chsh.abs() <= TSIRELSON_BOUND + 1e-9);
    }

    #[test]
    fn chsh_is_affine_in_the_tables(seed in any::<u64>(), w in 0.0f64..1.0) {
        let mut r = rng(seed);
        let (x, y) = (ProductScenario::random(&mut r).dataset(), ProductScenario::random(&mut r).dataset());
        let mix = ExperimentDataset::from_tables(
            "mix",
            None,
            Experiment::ALL.map(|e| {
                let (p, q) = (x.table(e).probs(), y.table(e).probs());
                (e, CoincidenceTable::from_probs(std::array::from_fn(|k| w * p[k] + (1.0 - w) * q[k])).unwrap())
            }),
            None,
        )
        .unwrap();
        let expected = w * chsh(&x).chsh + (1.0 - w) * chsh(&y).chsh;
        prop_assert!((chsh(&mix).chsh - expected).abs() < 1e-12);
    }

    #[test]
    fn probabilities_are_a_distribution_and_match_expectation(seed in any::<u64>(), values in eigenvalue_pattern()) {
        let mut r = rng(seed);
        let m = ObservableModel::from_unitary(&random_unitary(&mut r, 4), values).unwrap();
        let s = StateVector::new(random_unit_vector(&mut r, 4), Provenance::User).unwrap();
        let p = probabilities_from_model(&s, &m).probs();
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let weighted: f64 = p.iter().zip(values).map(|(p, l)| p * l).sum();
        prop_assert!((expectation_from_model(&s, &m) - weighted).abs() < 1e-12);
    }

    #[test]
    fn synthesized_operator_has_the_given_eigenprojectors(seed in any::<u64>(), values in eigenvalue_pattern()) {
        let m = ObservableModel::from_unitary(&random_unitary(&mut rng(seed), 4), values).unwrap();
        let e = eigh(m.operator()).unwrap();
        for value in [1.0, -1.0] {
            let mut p = CMat::zeros(4, 4).unwrap();
            for k in 0..4 {
                if (e.values[k] - value).abs() < 1e-6 {
                    let v = e.vectors.column(k);
                    p = p.add(&CMat::outer(&v, &v).unwrap()).unwrap();
                }
            }
            prop_assert!(p.max_abs_diff(&m.eigenprojector(value)).unwrap() < 1e-8);
        }
    }

    #[test]
    fn outcome_probabilities_are_invariant_under_global_phase(seed in any::<u64>(), phase in 0.0f64..6.3) {
        let mut r = rng(seed);
        let m = ObservableModel::from_unitary(&random_unitary(&mut r, 4), DEFAULT_EIGENVALUES).unwrap();
        let v = random_unit_vector(&mut r, 4);
        let w = v.scale(Complex64::from_polar(1.0, phase));
        let (p, q) = (outcome_probabilities(&v, &m), outcome_probabilities(&w, &m));
        for k in 0..4 {
            prop_assert!((p[k] - q[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn dataset_files_round_trip(seed in any::<u64>()) {
        let ds = ProductScenario::random(&mut rng(seed)).dataset();
        let text = to_canonical_json(&DatasetFile::from_dataset(&ds));
        let (file, _) = DatasetFile::parse(&text, "t.json", true).unwrap();
        prop_assert_eq!(&to_canonical_json(&file), &text);
        let back = file.to_dataset("t.json").unwrap();
        for e in Experiment::ALL {
            prop_assert_eq!(back.table(e).probs(), ds.table(e).probs());
        }
    }

    #[test]
    fn state_files_round_trip(seed in any::<u64>()) {
        let v = random_unit_vector(&mut rng(seed), 4);
        let text = to_canonical_json(&StateFile::from_vector(&v));
        let file: StateFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&to_canonical_json(&file), &text);
        prop_assert!(file.to_vector().unwrap().max_abs_diff(&v).unwrap() < 1e-12);
    }
}

/// `diag(a, b, c, d) = X ⊗ Y` iff `a d = b c`.
fn is_product_pattern(v: [f64; 4]) -> bool {
    v[0] * v[3] == v[1] * v[2]
}

#[test]
fn canonical_vectors_are_their_own_basis() {
    for k in 0..4 {
        let v = CVec::basis(4, k).unwrap();
        assert!(schmidt_state(&v, &Isomorphism::canonical()).unwrap().is_product());
    }
}
