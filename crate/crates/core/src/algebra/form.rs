//! The exterior algebra over the anticommuting generators {psi_x, psibar_x}
//! with coefficients in the polynomial ring over {phi_x, phibar_x}.
//!
//! Generators carry the fixed global order psi_1 < psibar_1 < psi_2 < ...,
//! realized as bit index 2x for psi_x and 2x+1 for psibar_x in a word mask.
//! All wedge signs come from the sorted-merge inversion count against that
//! order.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::poly::{boson_var_name, Polynomial};
use crate::linalg::Matrix;
use crate::scalar::{factorial, Scalar};

/// A product of distinct anticommuting generators, as a bitmask in the
/// global order. Bit 2x is psi_x, bit 2x+1 is psibar_x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FermionWord(pub u64);

impl FermionWord {
    pub const EMPTY: FermionWord = FermionWord(0);

    pub fn psi(x: usize) -> Self {
        FermionWord(1 << (2 * x))
    }

    pub fn psibar(x: usize) -> Self {
        FermionWord(1 << (2 * x + 1))
    }

    /// psi_x ^ psibar_x, even and already sorted.
    pub fn pair(x: usize) -> Self {
        FermionWord(0b11 << (2 * x))
    }

    /// Full word over sites 0..m in the global order.
    pub fn top(m: usize) -> Self {
        FermionWord((1u64 << (2 * m)) - 1)
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, generator: u32) -> bool {
        self.0 >> generator & 1 == 1
    }

    /// Generator indices in ascending (global) order.
    pub fn generators(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let g = rest.trailing_zeros();
                rest &= rest - 1;
                Some(g)
            }
        })
    }

    /// Number of psi generators (even bits).
    pub fn psi_count(self) -> u32 {
        (self.0 & 0x5555_5555_5555_5555).count_ones()
    }

    /// Number of psibar generators (odd bits).
    pub fn psibar_count(self) -> u32 {
        (self.0 & 0xAAAA_AAAA_AAAA_AAAA).count_ones()
    }

    /// Sign of merging `self` before `other` into sorted order; 0 when the
    /// words share a generator (the product vanishes by nilpotency).
    pub fn merge_sign(self, other: FermionWord) -> i32 {
        if self.0 & other.0 != 0 {
            return 0;
        }
        let mut inversions = 0u32;
        for g in other.generators() {
            inversions += (self.0 >> (g + 1)).count_ones();
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for FermionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let names: Vec<String> = self
            .generators()
            .map(|g| {
                let site = g / 2 + 1;
                if g % 2 == 0 {
                    format!("psi_{site}")
                } else {
                    format!("psibar_{site}")
                }
            })
            .collect();
        write!(f, "{}", names.join("*"))
    }
}

/// An element of the exterior algebra: a sparse map from fermion words to
/// polynomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<S: Scalar> {
    terms: BTreeMap<FermionWord, Polynomial<S>>,
}

impl<S: Scalar> Form<S> {
    pub fn zero() -> Self {
        Form {
            terms: BTreeMap::new(),
        }
    }

    /// The unit form.
    pub fn unit() -> Self {
        Form::from_poly(Polynomial::one())
    }

    /// A zero-form (purely bosonic).
    pub fn from_poly(p: Polynomial<S>) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(FermionWord::EMPTY, p);
        }
        Form { terms }
    }

    pub fn from_word(w: FermionWord) -> Self {
        Form::from_term(w, Polynomial::one())
    }

    pub fn from_term(w: FermionWord, p: Polynomial<S>) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(w, p);
        }
        Form { terms }
    }

    pub fn psi(x: usize) -> Self {
        Form::from_word(FermionWord::psi(x))
    }

    pub fn psibar(x: usize) -> Self {
        Form::from_word(FermionWord::psibar(x))
    }

    /// phi_x as a zero-form.
    pub fn phi(x: usize) -> Self {
        Form::from_poly(Polynomial::var(2 * x as u32))
    }

    /// phibar_x as a zero-form.
    pub fn phibar(x: usize) -> Self {
        Form::from_poly(Polynomial::var(2 * x as u32 + 1))
    }

    /// tau_x = phi_x phibar_x + psi_x psibar_x.
    pub fn tau(x: usize) -> Self {
        let boson = Polynomial::var(2 * x as u32).mul(&Polynomial::var(2 * x as u32 + 1));
        Form::from_poly(boson).add(&Form::from_word(FermionWord::pair(x)))
    }

    /// The invariant form v_{x,y} = phi_x psibar_y, normalized so that
    /// Q v_{x,x} = tau_x.
    pub fn v_form(x: usize, y: usize) -> Self {
        Form::from_term(FermionWord::psibar(y), Polynomial::var(2 * x as u32))
    }

    /// The action S_A = phi A phibar + psi A psibar as an even form.
    pub fn action(a: &Matrix<S>) -> Self {
        assert!(a.is_square());
        let m = a.n_rows();
        let mut out = Form::zero();
        for x in 0..m {
            for y in 0..m {
                let c = a.get(x, y);
                if c.is_zero() {
                    continue;
                }
                let boson = Polynomial::from_monomial(
                    crate::algebra::poly::Monomial::from_pairs(&[
                        (2 * x as u32, 1),
                        (2 * y as u32 + 1, 1),
                    ]),
                    c.clone(),
                );
                out = out.add(&Form::from_poly(boson));
                let fermion = Form::psi(x).wedge(&Form::psibar(y)).scale(c);
                out = out.add(&fermion);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (FermionWord, &Polynomial<S>)> {
        self.terms.iter().map(|(w, p)| (*w, p))
    }

    pub fn coefficient(&self, w: FermionWord) -> Polynomial<S> {
        self.terms.get(&w).cloned().unwrap_or_else(Polynomial::zero)
    }

    /// The degree-zero part.
    pub fn zero_part(&self) -> Polynomial<S> {
        self.coefficient(FermionWord::EMPTY)
    }

    /// True when every word has even degree.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|w| w.degree() % 2 == 0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|w| w.degree()).max().unwrap_or(0)
    }

    fn insert(&mut self, w: FermionWord, p: Polynomial<S>) {
        if p.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&p);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Form<S>) -> Form<S> {
        let mut out = self.clone();
        for (w, p) in other.terms() {
            out.insert(w, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form<S>) -> Form<S> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form<S> {
        Form {
            terms: self
                .terms
                .iter()
                .map(|(w, p)| (*w, p.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Form<S> {
        if s.is_zero() {
            return Form::zero();
        }
        Form {
            terms: self
                .terms
                .iter()
                .map(|(w, p)| (*w, p.scale(s)))
                .collect(),
        }
    }

    /// Multiplies by a zero-form polynomial (commutes with everything).
    pub fn scale_poly(&self, p: &Polynomial<S>) -> Form<S> {
        let mut out = Form::zero();
        for (w, q) in self.terms() {
            out.insert(w, q.mul(p));
        }
        out
    }

    /// The anticommuting wedge product. Bilinear and associative; the sign
    /// is the sorted-merge parity, coefficients multiply commutatively.
    pub fn wedge(&self, other: &Form<S>) -> Form<S> {
        let mut out = Form::zero();
        for (wa, pa) in self.terms() {
            for (wb, pb) in other.terms() {
                let sign = wa.merge_sign(wb);
                if sign == 0 {
                    continue;
                }
                let mut p = pa.mul(pb);
                if sign < 0 {
                    p = p.neg();
                }
                out.insert(FermionWord(wa.0 | wb.0), p);
            }
        }
        out
    }

    pub fn wedge_pow(&self, n: u32) -> Form<S> {
        let mut acc = Form::unit();
        for _ in 0..n {
            acc = acc.wedge(self);
        }
        acc
    }

    /// Derivative of every coefficient with respect to phi_x (even
    /// operation, no signs).
    pub fn dphi(&self, x: usize) -> Form<S> {
        self.map_coeffs(|p| p.derivative(2 * x as u32))
    }

    /// Derivative of every coefficient with respect to phibar_x.
    pub fn dphibar(&self, x: usize) -> Form<S> {
        self.map_coeffs(|p| p.derivative(2 * x as u32 + 1))
    }

    fn map_coeffs(&self, f: impl Fn(&Polynomial<S>) -> Polynomial<S>) -> Form<S> {
        let mut out = Form::zero();
        for (w, p) in self.terms() {
            out.insert(w, f(p));
        }
        out
    }
}

/// The fermionic expansion of e^{-S_A} relative to the bosonic prefactor:
/// sum_{n=0}^{M} (-1)^n/n! (psi A psibar)^n. The zero-form factor
/// e^{-phi A phibar} is tracked by the caller, not expanded here.
pub fn exp_action_expansion<S: Scalar>(a: &Matrix<S>) -> Form<S> {
    assert!(a.is_square());
    let m = a.n_rows();
    assert!(m <= 16, "fermionic expansion is desk-scale only");
    let mut bilinear = Form::zero();
    for x in 0..m {
        for y in 0..m {
            let c = a.get(x, y);
            if !c.is_zero() {
                bilinear = bilinear.add(&Form::psi(x).wedge(&Form::psibar(y)).scale(c));
            }
        }
    }
    let mut out = Form::zero();
    let mut power = Form::unit();
    for n in 0..=m as u32 {
        if n > 0 {
            power = power.wedge(&bilinear);
        }
        let mut coeff = S::one() * factorial::<S>(n).try_inv().expect("n! != 0");
        if n % 2 == 1 {
            coeff = -coeff;
        }
        out = out.add(&power.scale(&coeff));
    }
    out
}

impl<S: Scalar> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(w, p)| {
                let coeff = p.format_with(&boson_var_name);
                if w.is_empty() {
                    format!("({coeff})")
                } else {
                    format!("({coeff})*{w}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
