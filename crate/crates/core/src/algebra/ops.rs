//! The antiderivations d and iota, the supersymmetry generator Q = d + iota,
//! and the nilpotent functional calculus for functions of tau.
//!
//! Normalization: d phi_x = psi_x, iota psi_x = -phi_x, iota psibar_x =
//! +phibar_x. With these choices Q v_{x,x} = tau_x holds with unit constants
//! and the rotation flow has eigenvalue -1 on phi_x; the square-root-of-2-pi
//! branch of the raw differentials never survives into any identity checked
//! here and is recoverable by a global rescaling.

use crate::algebra::form::{FermionWord, Form};
use crate::algebra::poly::Polynomial;
use crate::scalar::Scalar;

/// Exterior derivative: on a zero form f,
/// df = sum_x (df/dphi_x) psi_x + (df/dphibar_x) psibar_x, extended as an
/// antiderivation with d(generator) = 0; satisfies d^2 = 0.
pub fn exterior_derivative<S: Scalar>(f: &Form<S>) -> Form<S> {
    let mut out = Form::zero();
    for (word, p) in f.terms() {
        // boson variable v and generator v share the same index convention
        for v in p.vars() {
            let dp = p.derivative(v);
            if dp.is_zero() {
                continue;
            }
            let gen = FermionWord(1 << v);
            let sign = gen.merge_sign(word);
            if sign == 0 {
                continue;
            }
            let coeff = if sign < 0 { dp.neg() } else { dp };
            out = out.add(&Form::from_term(FermionWord(gen.0 | word.0), coeff));
        }
    }
    out
}

/// Interior product with the rotation vector field: the degree -1
/// antiderivation with iota psi_x = -phi_x, iota psibar_x = +phibar_x, zero
/// on zero-forms; satisfies iota^2 = 0.
pub fn interior_product<S: Scalar>(f: &Form<S>) -> Form<S> {
    let mut out = Form::zero();
    for (word, p) in f.terms() {
        for (pos, g) in word.generators().enumerate() {
            // antiderivation walks past `pos` earlier generators
            let mut factor = Polynomial::var(g);
            if g % 2 == 0 {
                factor = factor.neg();
            }
            let mut coeff = p.mul(&factor);
            if pos % 2 == 1 {
                coeff = coeff.neg();
            }
            out = out.add(&Form::from_term(FermionWord(word.0 & !(1 << g)), coeff));
        }
    }
    out
}

/// The supersymmetry generator Q = d + iota.
pub fn supersymmetry_q<S: Scalar>(f: &Form<S>) -> Form<S> {
    exterior_derivative(f).add(&interior_product(f))
}

/// Lie derivative of the rotation flow, computed termwise from the
/// eigenvalue: each phibar/psibar factor counts +1, each phi/psi factor -1.
/// Cartan's formula asserts this equals d iota + iota d = Q^2.
pub fn lie_derivative<S: Scalar>(f: &Form<S>) -> Form<S> {
    let mut out = Form::zero();
    for (word, p) in f.terms() {
        let word_eigen: i64 =
            i64::from(word.psibar_count()) - i64::from(word.psi_count());
        for (mono, c) in p.terms() {
            let mut eigen = word_eigen;
            for &(v, e) in mono.exponents() {
                if v % 2 == 0 {
                    eigen -= i64::from(e);
                } else {
                    eigen += i64::from(e);
                }
            }
            let coeff = Polynomial::from_monomial(mono.clone(), c.clone() * S::from_int(eigen));
            out = out.add(&Form::from_term(word, coeff));
        }
    }
    out
}

/// The nilpotent calculus for K = tau: given a polynomial F in the variables
/// t_1..t_M, returns
/// sum_{alpha in {0,1}^M} (d^alpha F)(phi phibar) prod_{x in alpha} psi_x psibar_x
/// (higher multi-indices vanish by nilpotency, and 1/alpha! = 1).
pub fn form_of_tau_function<S: Scalar>(f: &Polynomial<S>) -> Form<S> {
    let vars = f.vars();
    assert!(
        vars.len() <= 20,
        "tau calculus over {} sites is not desk-scale",
        vars.len()
    );
    let mut out = Form::zero();
    for mask in 0u32..(1 << vars.len()) {
        let mut deriv = f.clone();
        let mut word = FermionWord::EMPTY;
        for (i, &x) in vars.iter().enumerate() {
            if mask >> i & 1 == 1 {
                deriv = deriv.derivative(x);
                word = FermionWord(word.0 | FermionWord::pair(x as usize).0);
            }
        }
        if deriv.is_zero() {
            continue;
        }
        // pairs psi_x psibar_x are even and internally sorted: sign +1
        out = out.add(&Form::from_term(word, deriv.substitute_tau_zero_part()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Monomial;
    use crate::fixtures;
    use crate::rng::SubRng;
    use crate::scalar::CRat;

    fn phi(x: usize) -> Polynomial<CRat> {
        Polynomial::var(2 * x as u32)
    }

    fn phibar(x: usize) -> Polynomial<CRat> {
        Polynomial::var(2 * x as u32 + 1)
    }

    #[test]
    fn d_of_phi_is_psi() {
        let f: Form<CRat> = Form::phi(0);
        assert_eq!(exterior_derivative(&f), Form::psi(0));
    }

    #[test]
    fn d_product_rule_on_zero_form() {
        let f: Form<CRat> = Form::from_poly(phi(0).mul(&phibar(0)));
        let expect = Form::psi(0)
            .scale_poly(&phibar(0))
            .add(&Form::psibar(0).scale_poly(&phi(0)));
        assert_eq!(exterior_derivative(&f), expect);
    }

    #[test]
    fn d_squared_zero() {
        let f: Form<CRat> = Form::from_poly(phi(0).mul(&phibar(1)));
        assert!(exterior_derivative(&exterior_derivative(&f)).is_zero());
    }

    #[test]
    fn iota_on_psi() {
        let f: Form<CRat> = Form::psi(0);
        assert_eq!(interior_product(&f), Form::from_poly(phi(0).neg()));
    }

    #[test]
    fn iota_kills_zero_forms() {
        let f: Form<CRat> = Form::from_poly(phi(0).pow(3));
        assert!(interior_product(&f).is_zero());
    }

    #[test]
    fn iota_antiderivation_rule() {
        // iota(psi_1 psibar_1) = (iota psi_1) psibar_1 - psi_1 (iota psibar_1)
        //                      = -phi_1 psibar_1 - phibar_1 psi_1
        let f: Form<CRat> = Form::from_word(FermionWord::pair(0));
        let expect = Form::psibar(0)
            .scale_poly(&phi(0).neg())
            .add(&Form::psi(0).scale_poly(&phibar(0).neg()));
        assert_eq!(interior_product(&f), expect);
    }

    #[test]
    fn iota_squared_zero_on_corpus() {
        let corpus = random_form_corpus(3, 12);
        for f in &corpus {
            assert!(interior_product(&interior_product(f)).is_zero());
        }
    }

    #[test]
    fn q_of_v_is_tau() {
        let v: Form<CRat> = Form::v_form(0, 0);
        assert_eq!(supersymmetry_q(&v), Form::tau(0));
    }

    #[test]
    fn action_is_q_closed() {
        let m = fixtures::i2::<CRat>();
        let form = m.quadratic_form();
        let a = form.entries();
        let s = Form::action(a);
        assert!(supersymmetry_q(&s).is_zero());
        // and Q-exact: S_A = Q(sum A_xy v_xy)
        let mut vsum: Form<CRat> = Form::zero();
        for x in 0..2 {
            for y in 0..2 {
                vsum = vsum.add(&Form::v_form(x, y).scale(a.get(x, y)));
            }
        }
        assert_eq!(supersymmetry_q(&vsum), s);
    }

    #[test]
    fn q_squared_is_lie_derivative() {
        // Q^2(phi_1) = -phi_1, the rotation eigenvalue, = (d iota + iota d)(phi_1)
        let f: Form<CRat> = Form::phi(0);
        let q2 = supersymmetry_q(&supersymmetry_q(&f));
        assert_eq!(q2, Form::from_poly(phi(0).neg()));
        let cartan = exterior_derivative(&interior_product(&f))
            .add(&interior_product(&exterior_derivative(&f)));
        assert_eq!(q2, cartan);
        assert_eq!(q2, lie_derivative(&f));
    }

    #[test]
    fn cartan_formula_on_corpus() {
        for f in &random_form_corpus(3, 16) {
            let q2 = supersymmetry_q(&supersymmetry_q(f));
            let cartan = exterior_derivative(&interior_product(f))
                .add(&interior_product(&exterior_derivative(f)));
            assert_eq!(q2, cartan);
            assert_eq!(q2, lie_derivative(f));
            assert!(exterior_derivative(&exterior_derivative(f)).is_zero());
        }
    }

    #[test]
    fn tau_function_linear_case() {
        let f: Polynomial<CRat> = Polynomial::var(0);
        assert_eq!(form_of_tau_function(&f), Form::tau(0));
    }

    #[test]
    fn tau_function_square_drops_nilpotent_layer() {
        // F = t_1^2 -> (phi phibar)^2 + 2 phi phibar psi psibar
        let f: Polynomial<CRat> = Polynomial::var(0).pow(2);
        let form = form_of_tau_function(&f);
        let boson = phi(0).mul(&phibar(0));
        let expect = Form::from_poly(boson.pow(2)).add(
            &Form::from_word(FermionWord::pair(0))
                .scale_poly(&boson.scale(&CRat::from_int(2))),
        );
        assert_eq!(form, expect);
    }

    #[test]
    fn tau_function_product_case() {
        // F = t_1 t_2 expands to the four-term product, equal to tau_1 ^ tau_2
        let f: Polynomial<CRat> = Polynomial::var(0).mul(&Polynomial::var(1));
        let form = form_of_tau_function(&f);
        let direct: Form<CRat> = Form::tau(0).wedge(&Form::tau(1));
        assert_eq!(form, direct);
    }

    #[test]
    fn tau_function_is_ring_morphism() {
        let mut rng = SubRng::new(9);
        for _ in 0..10 {
            let f = random_tau_poly(&mut rng, 3, 2);
            let g = random_tau_poly(&mut rng, 3, 2);
            let lhs = form_of_tau_function(&f.mul(&g));
            let rhs = form_of_tau_function(&f).wedge(&form_of_tau_function(&g));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn q_chain_rule_on_tau_functions() {
        // Q tau_x = 0, so the chain rule forces Q(F(tau)) = 0 exactly
        let mut rng = SubRng::new(10);
        for x in 0..3usize {
            assert!(supersymmetry_q(&Form::<CRat>::tau(x)).is_zero());
        }
        for _ in 0..10 {
            let f = random_tau_poly(&mut rng, 3, 3);
            assert!(supersymmetry_q(&form_of_tau_function(&f)).is_zero());
        }
    }

    /// Random forms with degree <= 4 words, coefficient degree <= 3, M <= 3.
    fn random_form_corpus(m: usize, count: usize) -> Vec<Form<CRat>> {
        let mut rng = SubRng::new(77);
        let mut out = Vec::new();
        for _ in 0..count {
            let mut f: Form<CRat> = Form::zero();
            for _ in 0..3 {
                let word = FermionWord(rng.next_u64() & ((1 << (2 * m)) - 1));
                if word.degree() > 4 {
                    continue;
                }
                let mut mono = Vec::new();
                for _ in 0..rng.below(3) {
                    mono.push((rng.below(2 * m as u64) as u32, 1 + rng.below(2) as u32));
                }
                let coeff = CRat::from_int(rng.below(9) as i64 - 4);
                f = f.add(&Form::from_term(
                    word,
                    Polynomial::from_monomial(Monomial::from_pairs(&mono), coeff),
                ));
            }
            out.push(f);
        }
        out
    }

    pub(crate) fn random_tau_poly(rng: &mut SubRng, m: usize, max_deg: u32) -> Polynomial<CRat> {
        let mut p = Polynomial::zero();
        for _ in 0..4 {
            let mut mono = Vec::new();
            for _ in 0..rng.below(u64::from(max_deg) + 1) {
                mono.push((rng.below(m as u64) as u32, 1));
            }
            let coeff = CRat::from_int(rng.below(11) as i64 - 5);
            p = p.add(&Polynomial::from_monomial(
                Monomial::from_pairs(&mono),
                coeff,
            ));
        }
        p
    }
}
