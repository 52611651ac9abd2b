//! The supersymmetry identity corpus as a standalone report.

use serde::Serialize;

use gsaw_core::algebra::{
    exterior_derivative, form_of_tau_function, interior_product, lie_derivative, supersymmetry_q,
    FermionWord, Form, Monomial, Polynomial,
};
use gsaw_core::gaussian::mixed_expectation;
use gsaw_core::model::{covariance, CouplingModel};
use gsaw_core::rng::SubRng;
use gsaw_core::scalar::{Scalar, FLOAT_TOL};

use crate::report::{summarize, Item, Summary};

#[derive(Debug, Serialize)]
pub struct SusyReport {
    pub command: String,
    pub model: String,
    pub seed: u64,
    pub items: Vec<Item>,
    pub summary: Summary,
}

pub fn run<S: Scalar>(
    model: &CouplingModel<S>,
    model_name: &str,
    seed: u64,
    rounds: u64,
) -> SusyReport {
    let m = model.size();
    let mut rng = SubRng::new(seed);
    let mut items = Vec::new();

    // Q v_{x,x} = tau_x, sitewise
    let mut ok = true;
    for x in 0..m {
        if supersymmetry_q(&Form::<S>::v_form(x, x)) != Form::tau(x) {
            ok = false;
        }
    }
    items.push(status_item("q-v-equals-tau", ok, format!("{m} sites")));

    // Q(S_A) = 0
    let action: Form<S> = Form::action(model.quadratic_form().entries());
    items.push(status_item(
        "action-q-closed",
        supersymmetry_q(&action).is_zero(),
        "Q of the action form".into(),
    ));

    // d^2 = iota^2 = 0, Cartan, and the termwise Lie derivative
    let mut corpus_ok = true;
    for _ in 0..rounds.max(1) {
        let f = random_form::<S>(&mut rng, m.min(3));
        if !exterior_derivative(&exterior_derivative(&f)).is_zero()
            || !interior_product(&interior_product(&f)).is_zero()
        {
            corpus_ok = false;
            break;
        }
        let q2 = supersymmetry_q(&supersymmetry_q(&f));
        let cartan = exterior_derivative(&interior_product(&f))
            .add(&interior_product(&exterior_derivative(&f)));
        if q2 != cartan || q2 != lie_derivative(&f) {
            corpus_ok = false;
            break;
        }
    }
    items.push(status_item(
        "cartan-square-root",
        corpus_ok,
        format!("{rounds} random forms"),
    ));

    // chain rule consequence: Q(F(tau)) = 0
    let mut chain_ok = true;
    for _ in 0..rounds.max(1) {
        let p = random_tau_poly::<S>(&mut rng, m, 3);
        if !supersymmetry_q(&form_of_tau_function(&p)).is_zero() {
            chain_ok = false;
            break;
        }
    }
    items.push(status_item(
        "chain-rule-on-tau",
        chain_ok,
        format!("{rounds} random polynomials"),
    ));

    // Q-exact forms integrate to zero
    match covariance(&model.quadratic_form()) {
        Ok(cov) => {
            let mut exact_ok = true;
            for _ in 0..rounds.max(1) {
                let p = random_tau_poly::<S>(&mut rng, m, 2);
                let x = rng.below(m as u64) as usize;
                let eta = form_of_tau_function(&p).wedge(&Form::v_form(x, x));
                let val = mixed_expectation(&cov, &supersymmetry_q(&eta))
                    .unwrap_or_else(|_| S::from_int(1));
                if !val.approx_eq(&S::zero(), FLOAT_TOL) {
                    exact_ok = false;
                    break;
                }
            }
            items.push(status_item(
                "q-exact-integrals-vanish",
                exact_ok,
                format!("{rounds} random invariant forms"),
            ));
        }
        Err(e) => items.push(Item::skip("q-exact-integrals-vanish", e.to_string())),
    }

    let summary = summarize(&items);
    SusyReport {
        command: "susy".into(),
        model: model_name.into(),
        seed,
        items,
        summary,
    }
}

fn status_item(id: &str, ok: bool, detail: String) -> Item {
    if ok {
        Item::pass(id, "holds".into(), "holds".into(), detail)
    } else {
        Item::fail(id, "violated".into(), "holds".into(), detail)
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
