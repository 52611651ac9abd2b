//! Cross-module identity checks on randomized models: every representation
//! is computed through at least two independent code paths and compared
//! exactly in rational arithmetic.

use std::collections::BTreeSet;

use proptest::prelude::*;

use gsaw_core::algebra::{
    exterior_derivative, form_of_tau_function, interior_product, lie_derivative, supersymmetry_q,
    FermionWord, Form, Monomial, Polynomial,
};
use gsaw_core::fixtures;
use gsaw_core::gaussian::{
    bosonic_loop_integral, boson_moment, fermion_loop_moment, fermion_moment,
    local_time_moment_oracle, mixed_expectation, mixed_expectation_oracle, saw_mixed_integrand,
    tau_expectation, tau_weighted_two_point, MomentRequest,
};
use gsaw_core::linalg::Matrix;
use gsaw_core::model::{covariance, Covariance};
use gsaw_core::rng::SubRng;
use gsaw_core::scalar::{CRat, Scalar};
use gsaw_core::walks::{
    config_weight, enumerate_loop_configs, enumerate_saws, loop_two_point, saw_two_point,
    srw_two_point_series,
};
use num_traits::Zero;

fn cov_of(model: &gsaw_core::model::CouplingModel<CRat>) -> Covariance<CRat> {
    covariance(&model.quadratic_form()).unwrap()
}

#[test]
fn walk_series_converges_to_covariance_on_random_models() {
    let mut rng = SubRng::new(101);
    for m in 1..=5 {
        for _ in 0..4 {
            let model = fixtures::random_markov_model(&mut rng, m);
            let cov = cov_of(&model);
            for maxlen in [0, 3, 11] {
                for a in 0..m {
                    for b in 0..m {
                        let (partial, tail) = srw_two_point_series(&model, a, b, maxlen).unwrap();
                        let diff = (partial - cov.get(a, b).clone()).abs_sq();
                        assert!(diff <= tail.clone() * tail.clone());
                    }
                }
            }
        }
    }
}

#[test]
fn loop_model_equals_bosonic_integral_on_random_models() {
    let mut rng = SubRng::new(102);
    for m in 1..=5 {
        for _ in 0..4 {
            let model = fixtures::random_complex_model(&mut rng, m);
            let cov = cov_of(&model);
            for a in 0..m {
                let b = (a + 1) % m;
                for wick in [false, true] {
                    let enumerated = loop_two_point(&cov, a, b, wick);
                    let integral = bosonic_loop_integral(&cov, a, b, wick).unwrap();
                    assert_eq!(enumerated, integral, "m={m} a={a} b={b} wick={wick}");
                }
                // equal endpoints are allowed everywhere
                let enumerated = loop_two_point(&cov, a, a, false);
                let integral = bosonic_loop_integral(&cov, a, a, false).unwrap();
                assert_eq!(enumerated, integral);
            }
        }
    }
}

#[test]
fn saw_model_equals_mixed_integral_on_random_models() {
    let mut rng = SubRng::new(103);
    for m in 1..=5 {
        for _ in 0..4 {
            let model = fixtures::random_complex_model(&mut rng, m);
            let cov = cov_of(&model);
            for (a, b) in [(0, m - 1), (0, 0)] {
                let enumerated = saw_two_point(&cov, a, b);
                let integrand: Form<CRat> = saw_mixed_integrand(m, a, b);
                let integral = mixed_expectation(&cov, &integrand).unwrap();
                assert_eq!(enumerated, integral, "m={m} a={a} b={b}");
            }
        }
    }
}

#[test]
fn product_expansion_equals_loop_config_sum() {
    // E[prod_{x in X} (1 + phi phibar)] = sum over disjoint loop configs,
    // connecting the Wick permanent to the cycle enumeration
    let mut rng = SubRng::new(104);
    for m in 1..=5usize {
        let model = fixtures::random_complex_model(&mut rng, m);
        let cov = cov_of(&model);
        for mask in 0u32..(1 << m) {
            let x: BTreeSet<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let mut integral = CRat::zero();
            for sub in subsets(&x) {
                integral = integral + boson_moment(&cov, &sub, &sub).unwrap();
            }
            let mut config_sum = CRat::zero();
            for config in enumerate_loop_configs(&x) {
                config_sum = config_sum + config_weight(&cov, &config);
            }
            assert_eq!(integral, config_sum, "m={m} X={x:?}");
        }
    }
}

fn subsets(x: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    let items: Vec<usize> = x.iter().copied().collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << items.len()) {
        out.push(
            (0..items.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| items[i])
                .collect(),
        );
    }
    out
}

#[test]
fn fermion_pair_words_match_cycle_signed_sums() {
    let mut rng = SubRng::new(105);
    for m in 2..=5usize {
        let model = fixtures::random_complex_model(&mut rng, m);
        let cov = cov_of(&model);
        for mask in 1u32..(1 << m) {
            let sites: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
            let mut word = FermionWord::EMPTY;
            for &x in &sites {
                word = FermionWord(word.0 | FermionWord::pair(x).0);
            }
            assert_eq!(
                fermion_moment(&cov, word),
                fermion_loop_moment(&cov, &sites)
            );
        }
    }
}

#[test]
fn tau_polynomial_recovery_on_random_polynomials() {
    let mut rng = SubRng::new(106);
    for m in 1..=4usize {
        let model = fixtures::random_complex_model(&mut rng, m);
        let cov = cov_of(&model);
        for _ in 0..8 {
            let f = random_tau_poly(&mut rng, m, 3);
            let expect = f.constant_term();
            assert_eq!(tau_expectation(&cov, &f).unwrap(), expect);
        }
    }
}

#[test]
fn tau_isomorphism_monomials_match_moment_oracle() {
    // on all three fixtures, every moment multiset with total order <= 3
    for model in fixtures::all_fixtures::<CRat>() {
        let m = model.size();
        let cov = cov_of(&model);
        for a in 0..m {
            for b in 0..m {
                for powers in power_multisets(m, 3) {
                    let req = MomentRequest::new(a, b, powers.clone()).unwrap();
                    let moment = local_time_moment_oracle(&cov, &req).unwrap();
                    let mut f: Polynomial<CRat> = Polynomial::one();
                    for (x, &k) in powers.iter().enumerate() {
                        f = f.mul(&Polynomial::var(x as u32).pow(k));
                    }
                    let tau_side = tau_weighted_two_point(&cov, &f, a, b).unwrap();
                    assert_eq!(moment, tau_side, "a={a} b={b} powers={powers:?}");
                }
            }
        }
    }
}

fn power_multisets(m: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; m]];
    for _ in 0..max_total {
        let mut next = Vec::new();
        for v in &out {
            let mut w = v.clone();
            // bump any site; duplicates are fine, dedup below
            for x in 0..m {
                w[x] += 1;
                next.push(w.clone());
                w[x] -= 1;
            }
        }
        out.extend(next);
    }
    out.sort();
    out.dedup();
    out.retain(|v| v.iter().sum::<u32>() <= max_total);
    out
}

#[test]
fn supersymmetry_corpus_on_random_invariant_forms() {
    // eta = P(tau) * v_{x,x} is invariant; Q(eta) must integrate to zero
    let mut rng = SubRng::new(107);
    for m in 1..=3usize {
        let model = fixtures::random_complex_model(&mut rng, m);
        let cov = cov_of(&model);
        for _ in 0..8 {
            let p = random_tau_poly(&mut rng, m, 2);
            let x = rng.below(m as u64) as usize;
            let eta = form_of_tau_function(&p).wedge(&Form::v_form(x, x));
            assert!(lie_derivative(&eta).is_zero(), "eta must be invariant");
            let q_eta = supersymmetry_q(&eta);
            assert!(mixed_expectation(&cov, &q_eta).unwrap().is_zero());
            assert!(mixed_expectation_oracle(&cov, &q_eta).unwrap().is_zero());
        }
    }
}

#[test]
fn oracle_agrees_with_main_path_on_seeded_corpus() {
    let mut rng = SubRng::new(108);
    for m in 1..=4usize {
        let model = fixtures::random_complex_model(&mut rng, m);
        let cov = cov_of(&model);
        for _ in 0..10 {
            let f = random_form(&mut rng, m);
            assert_eq!(
                mixed_expectation(&cov, &f).unwrap(),
                mixed_expectation_oracle(&cov, &f).unwrap()
            );
        }
    }
}

fn random_tau_poly(rng: &mut SubRng, m: usize, max_deg: u32) -> Polynomial<CRat> {
    let mut p = Polynomial::zero();
    for _ in 0..4 {
        let mut mono = Vec::new();
        for _ in 0..rng.below(u64::from(max_deg) + 1) {
            mono.push((rng.below(m as u64) as u32, 1));
        }
        let coeff = CRat::from_int(rng.below(11) as i64 - 5);
        p = p.add(&Polynomial::from_monomial(Monomial::from_pairs(&mono), coeff));
    }
    p
}

fn random_form(rng: &mut SubRng, m: usize) -> Form<CRat> {
    let mut f: Form<CRat> = Form::zero();
    for _ in 0..4 {
        let word = FermionWord(rng.next_u64() & ((1 << (2 * m)) - 1));
        if word.degree() > 6 {
            continue;
        }
        let mut pairs = Vec::new();
        for _ in 0..rng.below(4) {
            pairs.push((rng.below(2 * m as u64) as u32, 1 + rng.below(2) as u32));
        }
        let coeff = CRat::from_ratio(rng.below(9) as i64 - 4, 1 + rng.below(3) as i64);
        f = f.add(&Form::from_term(
            word,
            Polynomial::from_monomial(Monomial::from_pairs(&pairs), coeff),
        ));
    }
    f
}

#[test]
fn exact_reductions_are_thread_count_independent() {
    // fixed chunk boundaries + associative rational addition: any pool size
    // must produce the identical value
    let mut rng = SubRng::new(109);
    let m = fixtures::random_invertible_matrix(&mut rng, 9);
    let reference = m.permanent_ryser().unwrap();
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let value = pool.install(|| m.permanent_ryser().unwrap());
        assert_eq!(reference, value, "pool of {threads}");
    }
    assert_eq!(reference, m.permanent_naive());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn det_routes_agree(entries in prop::collection::vec(-6i64..=6, 16)) {
        let m = Matrix::from_fn(4, 4, |i, j| CRat::from_int(entries[4 * i + j]));
        prop_assert_eq!(m.det_bareiss(), m.det_naive());
    }

    #[test]
    fn permanent_routes_agree(entries in prop::collection::vec(-5i64..=5, 16)) {
        let m = Matrix::from_fn(4, 4, |i, j| CRat::from_int(entries[4 * i + j]));
        prop_assert_eq!(m.permanent_ryser().unwrap(), m.permanent_naive());
    }

    #[test]
    fn saw_enumeration_invariants(
        a in 0usize..6,
        b in 0usize..6,
        interior_mask in 0u32..64,
    ) {
        let interior: BTreeSet<usize> = (0..6)
            .filter(|&x| interior_mask >> x & 1 == 1 && x != a && x != b)
            .collect();
        let saws = enumerate_saws(a, b, &interior);
        let mut seen = BTreeSet::new();
        for s in &saws {
            prop_assert!(seen.insert(s.walk().vertices().to_vec()), "duplicate SAW");
            let v = s.walk().vertices();
            prop_assert_eq!(v[0], a);
            prop_assert_eq!(v[v.len() - 1], b);
            let mut interior_seen = BTreeSet::new();
            for &x in &v[1..v.len() - 1] {
                prop_assert!(interior.contains(&x));
                prop_assert!(interior_seen.insert(x));
            }
        }
        // one-step walk is always present
        prop_assert!(saws.iter().any(|s| s.walk().len() == 1));
    }

    #[test]
    fn wedge_anticommutes_and_squares_to_zero(g in 0u32..8, h in 0u32..8) {
        let a: Form<CRat> = Form::from_word(FermionWord(1 << g));
        let b: Form<CRat> = Form::from_word(FermionWord(1 << h));
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).neg());
        prop_assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn exterior_and_interior_square_to_zero(seed in 0u64..1000) {
        let mut rng = SubRng::new(seed);
        let f = random_form(&mut rng, 3);
        prop_assert!(exterior_derivative(&exterior_derivative(&f)).is_zero());
        prop_assert!(interior_product(&interior_product(&f)).is_zero());
        let q2 = supersymmetry_q(&supersymmetry_q(&f));
        prop_assert_eq!(q2, lie_derivative(&f));
    }
}
