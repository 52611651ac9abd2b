//! Exact computational engine for functional-integral representations of
//! random-walk models on a finite site set.
//!
//! The crate evaluates mixed bosonic-fermionic Gaussian integrals exactly,
//! enumerates walk and loop models combinatorially, simulates the killed and
//! unkilled continuous-time Markov chains, and cross-checks every
//! representation identity through independent code paths:
//!
//! - [`model`] — coupling matrices, hypothesis validation, exact covariances;
//! - [`walks`] — walk/SAW/loop enumeration and the combinatorial two-point
//!   functions;
//! - [`algebra`] — the exterior algebra of differential forms with polynomial
//!   coefficients and the operators d, iota, Q;
//! - [`gaussian`] — bosonic, fermionic, and mixed Gaussian expectations, with
//!   brute-force oracles;
//! - [`markov`] — continuous-time Markov chain simulation and Monte Carlo
//!   estimators.
//!
//! Arithmetic is dual-mode: exact complex rationals or complex doubles (see
//! [`scalar`]). Data-parallel reductions go through [`exec`], which keeps
//! results independent of the thread count; the `parallel` feature (default)
//! backs it with rayon.

pub mod algebra;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod gaussian;
pub mod linalg;
pub mod markov;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod walks;

pub use error::{Error, Result};
pub use scalar::{C64, CRat, RealScalar, Scalar};

pub use num_bigint::BigInt;
pub use num_complex::Complex;
pub use num_rational::BigRational;
pub use num_traits::{One, Zero};
