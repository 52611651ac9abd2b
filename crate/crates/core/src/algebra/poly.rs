//! Sparse multivariate polynomials over a [`Scalar`].
//!
//! A monomial is a sorted list of (variable, exponent) pairs. The same type
//! serves two roles with different variable conventions:
//!
//! - coefficient polynomials of forms: variable `2x` is phi_x and `2x+1` is
//!   phibar_x (mirroring the fermion generator indices);
//! - functions of tau: variable `x` is t_x.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exps: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial::default()
    }

    pub fn var(v: u32) -> Self {
        Monomial { exps: vec![(v, 1)] }
    }

    /// From (variable, exponent) pairs; zero exponents dropped, repeats merged.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for &(v, e) in pairs {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial {
            exps: map.into_iter().collect(),
        }
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn exponent_of(&self, v: u32) -> u32 {
        self.exps
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<u32, u32> = self.exps.iter().copied().collect();
        for &(v, e) in &other.exps {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial {
            exps: map.into_iter().collect(),
        }
    }

    /// Divides out one power of `v`; None if `v` does not occur.
    fn reduce_var(&self, v: u32) -> Option<Monomial> {
        let e = self.exponent_of(v);
        if e == 0 {
            return None;
        }
        let exps = self
            .exps
            .iter()
            .filter_map(|&(w, k)| {
                let k = if w == v { k - 1 } else { k };
                (k > 0).then_some((w, k))
            })
            .collect();
        Some(Monomial { exps })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S: Scalar> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Polynomial { terms }
    }

    pub fn var(v: u32) -> Self {
        Self::from_monomial(Monomial::var(v), S::one())
    }

    pub fn from_monomial(m: Monomial, c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// Value at the origin.
    pub fn constant_term(&self) -> S {
        self.coefficient(&Monomial::unit())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Variables occurring with nonzero exponent.
    pub fn vars(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.exponents().iter().map(|&(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn insert(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial<S>) -> Polynomial<S> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial<S>) -> Polynomial<S> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial<S> {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Polynomial<S> {
        if s.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), s.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial<S>) -> Polynomial<S> {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial<S> {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: u32) -> Polynomial<S> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent_of(v);
            if e == 0 {
                continue;
            }
            let reduced = m.reduce_var(v).expect("nonzero exponent");
            out.insert(reduced, c.clone() * S::from_int(i64::from(e)));
        }
        out
    }

    /// Substitutes t_x -> phi_x phibar_x: a polynomial over tau variables
    /// becomes a coefficient polynomial (variable x maps to 2x and 2x+1).
    pub fn substitute_tau_zero_part(&self) -> Polynomial<S> {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let pairs: Vec<(u32, u32)> = m
                .exponents()
                .iter()
                .flat_map(|&(x, e)| [(2 * x, e), (2 * x + 1, e)])
                .collect();
            out.insert(Monomial::from_pairs(&pairs), c.clone());
        }
        out
    }

    /// Renders with a caller-supplied variable namer, canonically ordered.
    pub fn format_with(&self, namer: &dyn Fn(u32) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            if m.is_unit() {
                factors.push(c.render());
            } else {
                if !c.is_one() {
                    factors.push(c.render());
                }
                for &(v, e) in m.exponents() {
                    if e == 1 {
                        factors.push(namer(v));
                    } else {
                        factors.push(format!("{}^{e}", namer(v)));
                    }
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

/// Namer for coefficient polynomials: 2x -> phi, 2x+1 -> phibar (1-based).
pub fn boson_var_name(v: u32) -> String {
    let site = v / 2 + 1;
    if v % 2 == 0 {
        format!("phi_{site}")
    } else {
        format!("phibar_{site}")
    }
}

/// Namer for tau polynomials: x -> t_{x+1}.
pub fn tau_var_name(v: u32) -> String {
    format!("t_{}", v + 1)
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_with(&boson_var_name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CRat;

    #[test]
    fn derivative_and_product() {
        // d/dt0 (t0^2 t1) = 2 t0 t1
        let p: Polynomial<CRat> = Polynomial::var(0).pow(2).mul(&Polynomial::var(1));
        let d = p.derivative(0);
        let expect =
            Polynomial::from_monomial(Monomial::from_pairs(&[(0, 1), (1, 1)]), CRat::from_int(2));
        assert_eq!(d, expect);
    }

    #[test]
    fn zero_coefficients_never_stored() {
        let p: Polynomial<CRat> = Polynomial::var(0).sub(&Polynomial::var(0));
        assert!(p.is_zero());
        assert_eq!(p.n_terms(), 0);
    }

    #[test]
    fn substitution_doubles_vars() {
        let p: Polynomial<CRat> = Polynomial::var(1).pow(2);
        let sub = p.substitute_tau_zero_part();
        let expect = Polynomial::from_monomial(
            Monomial::from_pairs(&[(2, 2), (3, 2)]),
            CRat::from_int(1),
        );
        assert_eq!(sub, expect);
    }

    #[test]
    fn display_canonical() {
        let p: Polynomial<CRat> = Polynomial::var(0)
            .mul(&Polynomial::var(1))
            .add(&Polynomial::constant(CRat::from_int(3)));
        assert_eq!(p.format_with(&boson_var_name), "3 + phi_1*phibar_1");
    }
}
