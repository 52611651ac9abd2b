//! The identity-verification suite: every representation computed through
//! two independent routes against the loaded model, with precondition-gated
//! skips and a fixed-seed statistical section.

use serde::Serialize;

use gsaw_core::algebra::{
    exterior_derivative, form_of_tau_function, interior_product, lie_derivative, supersymmetry_q,
    FermionWord, Form, Monomial, Polynomial,
};
use gsaw_core::gaussian::{
    bosonic_loop_integral, fermion_loop_moment, fermion_moment, generalized_cramer_check,
    local_time_moment_oracle, loop_cancellation_ledger, mixed_expectation,
    mixed_expectation_oracle, saw_mixed_integrand, tau_expectation, tau_weighted_two_point,
    MomentRequest, ORACLE_MAX_SITES,
};
use gsaw_core::markov::{
    estimate_dynkin, estimate_fk, estimate_wsaw, wsaw_g_taylor, wsaw_g_taylor_grassmann,
    wsaw_walk_sum, CtmcParams,
};
use gsaw_core::model::{covariance, CouplingModel, Covariance};
use gsaw_core::rng::SubRng;
use gsaw_core::scalar::{Scalar, FLOAT_TOL};

use crate::report::{hypotheses_of, render, summarize, Hypotheses, Item, Status, Summary};

/// Enumeration cost guard: loop/SAW sums grow factorially in the site count.
const ENUM_MAX_SITES: usize = 7;

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub command: String,
    pub model: String,
    pub arithmetic: String,
    pub seed: u64,
    pub samples: u64,
    pub hypotheses: Hypotheses,
    pub items: Vec<Item>,
    pub summary: Summary,
}

pub fn run<S: Scalar>(
    model: &CouplingModel<S>,
    model_name: &str,
    arithmetic: &str,
    seed: u64,
    samples: u64,
) -> VerifyReport {
    let mut items = Vec::new();
    let validation = model.validate();
    let hypotheses = hypotheses_of(&validation);

    let cov = match covariance(&model.quadratic_form()) {
        Ok(c) => Some(c),
        Err(e) => {
            items.push(Item::skip(
                "covariance",
                format!("quadratic form not invertible: {e}"),
            ));
            None
        }
    };

    if let Some(cov) = &cov {
        let mut rng = SubRng::new(seed);
        exact_identity_items(model, cov, &mut rng, &mut items);
    }

    // statistical section: gated on the Markov hypotheses
    if !validation.markov_ready() {
        items.push(Item::skip(
            "mc",
            "Markov hypotheses unmet (need d > 0, J >= 0, diagonal dominance)",
        ));
    } else if let Some(cov) = &cov {
        statistical_items(model, cov, seed, samples, &mut items);
    }

    let summary = summarize(&items);
    VerifyReport {
        command: "verify".into(),
        model: model_name.into(),
        arithmetic: arithmetic.into(),
        seed,
        samples,
        hypotheses,
        items,
        summary,
    }
}

fn check<S: Scalar>(items: &mut Vec<Item>, id: &str, lhs: &S, rhs: &S, detail: &str) {
    if lhs.approx_eq(rhs, FLOAT_TOL) {
        items.push(Item::pass(id, render(lhs), render(rhs), detail));
    } else {
        items.push(Item::fail(id, render(lhs), render(rhs), detail));
    }
}

fn exact_identity_items<S: Scalar>(
    model: &CouplingModel<S>,
    cov: &Covariance<S>,
    rng: &mut SubRng,
    items: &mut Vec<Item>,
) {
    let m = model.size();
    let one = S::one();

    // self-normalization through both evaluator routes
    let unit: Form<S> = Form::unit();
    let direct = mixed_expectation(cov, &unit).unwrap_or_else(|_| S::zero());
    check(items, "self-normalization/factorized", &direct, &one, "expectation of the unit form");
    if m <= ORACLE_MAX_SITES {
        match mixed_expectation_oracle(cov, &unit) {
            Ok(v) => check(
                items,
                "self-normalization/expansion-oracle",
                &v,
                &one,
                "top-word expansion route",
            ),
            Err(e) => items.push(Item::skip("self-normalization/expansion-oracle", e.to_string())),
        }
    } else {
        items.push(Item::skip(
            "self-normalization/expansion-oracle",
            format!("oracle capped at {ORACLE_MAX_SITES} sites"),
        ));
    }

    // factorized evaluator vs expansion oracle on random forms
    if m <= ORACLE_MAX_SITES {
        let mut worst: Option<(S, S)> = None;
        let mut all_ok = true;
        for _ in 0..10 {
            let f = random_form::<S>(rng, m);
            let a = mixed_expectation(cov, &f).unwrap_or_else(|_| S::zero());
            let b = mixed_expectation_oracle(cov, &f).unwrap_or_else(|_| S::zero());
            if !a.approx_eq(&b, FLOAT_TOL) {
                all_ok = false;
                worst = Some((a, b));
                break;
            }
            worst = Some((a, b));
        }
        let (l, r) = worst.expect("at least one form checked");
        let item = if all_ok {
            Item::pass("factorization-oracle", render(&l), render(&r), "10 random forms")
        } else {
            Item::fail("factorization-oracle", render(&l), render(&r), "mismatch on a random form")
        };
        items.push(item);
    }

    // determinant route vs cycle-signed permutation route on pair words
    {
        let sites: Vec<usize> = (0..m.min(5)).collect();
        let mut word = FermionWord::EMPTY;
        for &x in &sites {
            word = FermionWord(word.0 | FermionWord::pair(x).0);
        }
        let via_det = fermion_moment(cov, word);
        let via_cycles = fermion_loop_moment(cov, &sites);
        check(items, "fermion-determinant/cycle-signs", &via_det, &via_cycles, "pair word moment");
    }

    // walk series stays within its tail bound
    match gsaw_core::walks::srw_two_point_series(model, 0, m - 1, 12) {
        Ok((partial, tail)) => {
            let diff = (partial - cov.get(0, m - 1).clone()).abs_sq();
            let bound = tail.clone() * tail;
            let ok = diff <= bound;
            let item = if ok {
                Item::pass("walk-series-tail", format!("{diff}"), format!("{bound}"), "|partial - C|^2 vs tail^2")
            } else {
                Item::fail("walk-series-tail", format!("{diff}"), format!("{bound}"), "series strayed outside its bound")
            };
            items.push(item);
        }
        Err(e) => items.push(Item::skip("walk-series-tail", e.to_string())),
    }

    // loop and SAW models vs their Gaussian integrals
    if m <= ENUM_MAX_SITES {
        let (a, b) = (0, m - 1);
        for (id, wick) in [("loop-model/plain", false), ("loop-model/wick-ordered", true)] {
            let enumerated = gsaw_core::walks::loop_two_point(cov, a, b, wick);
            match bosonic_loop_integral(cov, a, b, wick) {
                Ok(integral) => check(items, id, &enumerated, &integral, "enumeration vs bosonic integral"),
                Err(e) => items.push(Item::skip(id, e.to_string())),
            }
        }
        let enumerated = gsaw_core::walks::saw_two_point(cov, a, b);
        match mixed_expectation(cov, &saw_mixed_integrand(m, a, b)) {
            Ok(integral) => check(
                items,
                "saw-mixed-integral",
                &enumerated,
                &integral,
                "enumeration vs mixed integral",
            ),
            Err(e) => items.push(Item::skip("saw-mixed-integral", e.to_string())),
        }

        // cycle-by-cycle loop cancellation
        let sites: Vec<usize> = (0..m).collect();
        match loop_cancellation_ledger(cov, &sites) {
            Ok(ledger) => {
                let item = if ledger.all_cancelled {
                    Item::pass(
                        "loop-cancellation",
                        render(&ledger.full_expectation),
                        render(&S::one()),
                        format!(
                            "{} subset totals vanished, {} cycle pairs cancelled",
                            ledger.subset_totals.len(),
                            ledger.cycle_pairs_checked
                        ),
                    )
                } else {
                    Item::fail(
                        "loop-cancellation",
                        render(&ledger.full_expectation),
                        render(&S::one()),
                        "a subset total survived",
                    )
                };
                items.push(item);
            }
            Err(e) => items.push(Item::skip("loop-cancellation", e.to_string())),
        }
    } else {
        items.push(Item::skip(
            "loop-model",
            format!("enumeration capped at {ENUM_MAX_SITES} sites"),
        ));
    }

    // value-at-zero recovery for polynomials of tau
    {
        let f = random_tau_poly::<S>(rng, m, 3);
        match tau_expectation(cov, &f) {
            Ok(v) => check(items, "tau-recovery", &v, &f.constant_term(), "E[F(tau)] = F(0)"),
            Err(e) => items.push(Item::skip("tau-recovery", e.to_string())),
        }
    }

    // tau-isomorphism on low-order moment monomials
    {
        let mut all_ok = true;
        let mut sample: Option<(S, S)> = None;
        'outer: for a in 0..m {
            for b in 0..m {
                for x in 0..m {
                    for k in 1..=2u32 {
                        let mut powers = vec![0u32; m];
                        powers[x] = k;
                        let req = MomentRequest::new(a, b, powers).expect("within cap");
                        let lhs = match local_time_moment_oracle(cov, &req) {
                            Ok(v) => v,
                            Err(_) => continue,
                        };
                        let f = Polynomial::var(x as u32).pow(k);
                        let rhs = match tau_weighted_two_point(cov, &f, a, b) {
                            Ok(v) => v,
                            Err(_) => continue,
                        };
                        if !lhs.approx_eq(&rhs, FLOAT_TOL) {
                            all_ok = false;
                            sample = Some((lhs, rhs));
                            break 'outer;
                        }
                        sample = Some((lhs, rhs));
                    }
                }
            }
        }
        match sample {
            Some((l, r)) if all_ok => items.push(Item::pass(
                "tau-isomorphism",
                render(&l),
                render(&r),
                "moment insertions vs weighted expectations, order <= 2",
            )),
            Some((l, r)) => items.push(Item::fail("tau-isomorphism", render(&l), render(&r), "mismatch")),
            None => items.push(Item::skip("tau-isomorphism", "no cases ran")),
        }
    }

    // generalized Cramer on the model's own quadratic form
    {
        let a_mat = model.quadratic_form().entries().clone();
        let p = 2.min(m);
        let rows: Vec<usize> = (0..p).collect();
        let cols: Vec<usize> = (m - p..m).collect();
        match generalized_cramer_check(&a_mat, &rows, &cols) {
            Ok((lhs, rhs)) => check(items, "generalized-cramer", &lhs, &rhs, "minor of inverse vs complementary minor"),
            Err(e) => items.push(Item::skip("generalized-cramer", e.to_string())),
        }
    }

    // supersymmetry corpus
    {
        let v00: Form<S> = Form::v_form(0, 0);
        let q_v = supersymmetry_q(&v00);
        let tau0 = Form::tau(0);
        let ok = q_v == tau0;
        items.push(if ok {
            Item::pass("susy/q-v-equals-tau", format!("{q_v}"), format!("{tau0}"), "Q of the invariant form")
        } else {
            Item::fail("susy/q-v-equals-tau", format!("{q_v}"), format!("{tau0}"), "mismatch")
        });

        let action: Form<S> = Form::action(model.quadratic_form().entries());
        let q_action = supersymmetry_q(&action);
        items.push(if q_action.is_zero() {
            Item::pass("susy/action-q-closed", "0".into(), "0".into(), "Q(S_A) vanishes")
        } else {
            Item::fail("susy/action-q-closed", format!("{q_action}"), "0".into(), "Q(S_A) nonzero")
        });

        let mut cartan_ok = true;
        for _ in 0..6 {
            let f = random_form::<S>(rng, m.min(3));
            let q2 = supersymmetry_q(&supersymmetry_q(&f));
            let cartan = exterior_derivative(&interior_product(&f))
                .add(&interior_product(&exterior_derivative(&f)));
            if q2 != cartan || q2 != lie_derivative(&f) {
                cartan_ok = false;
                break;
            }
        }
        items.push(if cartan_ok {
            Item::pass("susy/cartan", "Q^2".into(), "d iota + iota d".into(), "6 random forms")
        } else {
            Item::fail("susy/cartan", "Q^2".into(), "d iota + iota d".into(), "mismatch")
        });

        let p = random_tau_poly::<S>(rng, m, 2);
        let eta = form_of_tau_function(&p).wedge(&Form::v_form(0, 0));
        match mixed_expectation(cov, &supersymmetry_q(&eta)) {
            Ok(v) => check(items, "susy/q-exact-integral", &v, &S::zero(), "integral of a Q-exact form"),
            Err(e) => items.push(Item::skip("susy/q-exact-integral", e.to_string())),
        }
    }

    // Taylor coefficients of the weakly self-avoiding walk, both routes
    match (
        wsaw_g_taylor(model, 0, m - 1, &S::zero(), 2),
        wsaw_g_taylor_grassmann(model, 0, m - 1, &S::zero(), 2),
    ) {
        (Ok(a), Ok(b)) => {
            let ok = a
                .iter()
                .zip(&b)
                .all(|(x, y)| x.approx_eq(y, FLOAT_TOL));
            let l = a.iter().map(render).collect::<Vec<_>>().join(", ");
            let r = b.iter().map(render).collect::<Vec<_>>().join(", ");
            items.push(if ok {
                Item::pass("wsaw-taylor-routes", l, r, "moment route vs Grassmann route, k <= 2")
            } else {
                Item::fail("wsaw-taylor-routes", l, r, "Taylor coefficients differ")
            });
        }
        (Err(e), _) | (_, Err(e)) => items.push(Item::skip("wsaw-taylor-routes", e.to_string())),
    }
}

fn statistical_items<S: Scalar>(
    model: &CouplingModel<S>,
    cov: &Covariance<S>,
    seed: u64,
    samples: u64,
    items: &mut Vec<Item>,
) {
    let m = model.size();
    let (a, b) = (0, m - 1);
    let target = cov.get(a, b).to_c64().re;

    let killed = match CtmcParams::killed(model) {
        Ok(p) => p,
        Err(e) => {
            items.push(Item::skip("mc", e.to_string()));
            return;
        }
    };

    match estimate_dynkin(&killed, a, b, &vec![0.0; m], samples, seed) {
        Ok(est) => {
            let ok = est.within_sigma(target, 3.0);
            let item_detail = format!("n = {samples}, 3-sigma gate, stderr {:.3e}", est.stderr);
            items.push(if ok {
                Item::pass("mc/killed-local-time", format!("{:.6}", est.mean), format!("{target:.6}"), item_detail)
            } else {
                Item::fail("mc/killed-local-time", format!("{:.6}", est.mean), format!("{target:.6}"), item_detail)
            });
        }
        Err(e) => items.push(Item::skip("mc/killed-local-time", e.to_string())),
    }

    match CtmcParams::unkilled(model)
        .and_then(|p| estimate_fk(&p, a, b, &vec![0.0; m], samples, seed + 1, None))
    {
        Ok(est) => {
            let ok = est.within_sigma(target, 3.0);
            let detail = format!("horizon representation, stderr {:.3e}", est.stderr);
            items.push(if ok {
                Item::pass("mc/horizon", format!("{:.6}", est.mean), format!("{target:.6}"), detail)
            } else {
                Item::fail("mc/horizon", format!("{:.6}", est.mean), format!("{target:.6}"), detail)
            });
        }
        Err(e) => items.push(Item::skip("mc/horizon", e.to_string())),
    }

    match wsaw_walk_sum(model, a, b, 0.5, 0.0, 18) {
        Ok((walk, tail)) => match estimate_wsaw(&killed, a, b, 0.5, 0.0, samples, seed + 2) {
            Ok(est) => {
                let ok = (est.mean - walk).abs() <= 3.0 * est.stderr + tail;
                let detail = format!("g = 1/2, walk-sum tail {tail:.3e}, stderr {:.3e}", est.stderr);
                items.push(if ok {
                    Item::pass("mc/wsaw-walk-sum", format!("{:.6}", est.mean), format!("{walk:.6}"), detail)
                } else {
                    Item::fail("mc/wsaw-walk-sum", format!("{:.6}", est.mean), format!("{walk:.6}"), detail)
                });
            }
            Err(e) => items.push(Item::skip("mc/wsaw-walk-sum", e.to_string())),
        },
        Err(e) => items.push(Item::skip("mc/wsaw-walk-sum", e.to_string())),
    }
}

pub fn exit_status(items: &[Item]) -> u8 {
    if items.iter().any(|i| i.status == Status::Fail) {
        1
    } else {
        0
    }
}

fn random_form<S: Scalar>(rng: &mut SubRng, m: usize) -> Form<S> {
    let mut f: Form<S> = Form::zero();
    for _ in 0..4 {
        let word = FermionWord(rng.next_u64() & ((1 << (2 * m)) - 1));
        if word.degree() > 6 {
            continue;
        }
        let mut pairs = Vec::new();
        for _ in 0..rng.below(4) {
            pairs.push((rng.below(2 * m as u64) as u32, 1 + rng.below(2) as u32));
        }
        let coeff = S::from_int(rng.below(9) as i64 - 4);
        f = f.add(&Form::from_term(
            word,
            Polynomial::from_monomial(Monomial::from_pairs(&pairs), coeff),
        ));
    }
    f
}

fn random_tau_poly<S: Scalar>(rng: &mut SubRng, m: usize, max_deg: u32) -> Polynomial<S> {
    let mut p = Polynomial::zero();
    for _ in 0..4 {
        let mut mono = Vec::new();
        for _ in 0..rng.below(u64::from(max_deg) + 1) {
            mono.push((rng.below(m as u64) as u32, 1));
        }
        let coeff = S::from_int(rng.below(11) as i64 - 5);
        p = p.add(&Polynomial::from_monomial(Monomial::from_pairs(&mono), coeff));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_status_contract() {
        let ok = vec![
            Item::pass("a", "1".into(), "1".into(), ""),
            Item::skip("b", "gated"),
        ];
        assert_eq!(exit_status(&ok), 0);
        let bad = vec![
            Item::pass("a", "1".into(), "1".into(), ""),
            Item::fail("b", "1".into(), "2".into(), ""),
        ];
        assert_eq!(exit_status(&bad), 1);
    }

    #[test]
    fn verify_fixture_has_no_failures() {
        let model = gsaw_core::fixtures::i2::<gsaw_core::scalar::CRat>();
        let report = run(&model, "i2", "exact-rational-complex", 7, 20_000);
        assert!(report.items.iter().all(|i| i.status != Status::Fail));
        assert_eq!(exit_status(&report.items), 0);
    }
}
