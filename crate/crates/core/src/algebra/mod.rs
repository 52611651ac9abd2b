//! Exterior algebra of differential forms with polynomial coefficients, the
//! operators d, iota, Q, and the nilpotent functional calculus.

pub mod form;
pub mod ops;
pub mod poly;

pub use form::{exp_action_expansion, FermionWord, Form};
pub use ops::{
    exterior_derivative, form_of_tau_function, interior_product, lie_derivative, supersymmetry_q,
};
pub use poly::{Monomial, Polynomial};
