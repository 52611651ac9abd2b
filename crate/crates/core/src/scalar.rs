//! Dual-mode scalar arithmetic.
//!
//! Every evaluator in this crate is generic over [`Scalar`], which has two
//! implementations: exact complex rationals ([`CRat`]) and double-precision
//! complex numbers ([`C64`]). Exact mode turns every identity check into an
//! equality of rationals; float mode is what the Monte Carlo and quadrature
//! paths run on.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex rational: a pair of arbitrary-precision rationals.
pub type CRat = Complex<BigRational>;
/// Double-precision complex.
pub type C64 = Complex<f64>;

/// Default comparison tolerance in floating mode.
pub const FLOAT_TOL: f64 = 1e-10;
/// Pivot threshold below which floating-mode factorizations refuse to certify.
pub const PIVOT_TOL: f64 = 1e-12;

/// The ordered real field underlying a [`Scalar`].
pub trait RealScalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Certified upper bound on the square root (exact in rational mode).
    fn sqrt_upper(&self) -> Self;

    fn powi(&self, mut n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            n >>= 1;
        }
        acc
    }
}

impl RealScalar for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn sqrt_upper(&self) -> Self {
        assert!(
            !self.is_negative(),
            "sqrt_upper of a negative rational: {self}"
        );
        if num_traits::Zero::is_zero(self) {
            return <Self as RealScalar>::zero();
        }
        // Newton iteration x -> (x + a/x)/2 stays above sqrt(a) after one
        // step from any positive start, so the result is a certified upper
        // bound. The f64 seed makes convergence immediate.
        let seed = ToPrimitive::to_f64(self).unwrap_or(f64::NAN).sqrt();
        let mut x = BigRational::from_float(seed)
            .filter(|s| s.is_positive())
            .unwrap_or_else(|| {
                if *self >= <Self as RealScalar>::one() {
                    self.clone()
                } else {
                    <Self as RealScalar>::one()
                }
            });
        let half = <Self as RealScalar>::from_ratio(1, 2);
        for _ in 0..4 {
            x = (x.clone() + self / &x) * half.clone();
        }
        x
    }
}

impl RealScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt_upper(&self) -> Self {
        f64::sqrt(*self).next_up()
    }
}

/// A complex scalar field with exact or tolerance-based comparison.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    type Real: RealScalar;
    /// True when arithmetic is exact and equality is literal.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_real(re: Self::Real) -> Self;
    /// Exact embedding of a finite double (doubles are dyadic rationals).
    fn from_f64(v: f64) -> Self;
    fn new_complex(re: Self::Real, im: Self::Real) -> Self;
    fn conj(&self) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    /// |z|^2, exact in both modes.
    fn abs_sq(&self) -> Self::Real;
    fn try_inv(&self) -> Option<Self>;
    fn to_c64(&self) -> C64;
    /// Exact equality in exact mode; `tol`-relative comparison in float mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Compact rendering: real scalars print without the imaginary part.
    fn render(&self) -> String {
        let im = self.im();
        if im.is_zero() {
            format!("{}", self.re())
        } else {
            let im_str = format!("{im}");
            if im_str.starts_with('-') {
                format!("{}{im_str}i", self.re())
            } else {
                format!("{}+{im_str}i", self.re())
            }
        }
    }

    /// Certified upper bound on |z| (exact when z is real or imaginary).
    fn abs_upper(&self) -> Self::Real {
        let re = self.re();
        let im = self.im();
        if im.is_zero() {
            re.abs()
        } else if re.is_zero() {
            im.abs()
        } else {
            self.abs_sq().sqrt_upper()
        }
    }

    fn is_real(&self) -> bool {
        self.im().is_zero()
    }
}

impl Scalar for CRat {
    type Real = BigRational;
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Complex::new(
            <BigRational as RealScalar>::from_int(n),
            <BigRational as RealScalar>::zero(),
        )
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            <BigRational as RealScalar>::from_ratio(num, den),
            <BigRational as RealScalar>::zero(),
        )
    }
    fn from_real(re: Self::Real) -> Self {
        Complex::new(re, <BigRational as RealScalar>::zero())
    }
    fn from_f64(v: f64) -> Self {
        let re = BigRational::from_float(v).expect("finite double");
        Complex::new(re, <BigRational as RealScalar>::zero())
    }
    fn new_complex(re: Self::Real, im: Self::Real) -> Self {
        Complex::new(re, im)
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn re(&self) -> Self::Real {
        self.re.clone()
    }
    fn im(&self) -> Self::Real {
        self.im.clone()
    }
    fn abs_sq(&self) -> Self::Real {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }
    fn to_c64(&self) -> C64 {
        Complex::new(RealScalar::to_f64(&self.re), RealScalar::to_f64(&self.im))
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Scalar for C64 {
    type Real = f64;
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }
    fn from_real(re: f64) -> Self {
        Complex::new(re, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex::new(v, 0.0)
    }
    fn new_complex(re: f64, im: f64) -> Self {
        Complex::new(re, im)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }
    fn try_inv(&self) -> Option<Self> {
        if self.norm_sqr() == 0.0 {
            return None;
        }
        let inv = Self::one() / *self;
        if inv.re.is_finite() && inv.im.is_finite() {
            Some(inv)
        } else {
            None
        }
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.norm().max(other.norm()).max(1.0);
        (self - other).norm() <= tol * scale
    }
}

/// n! as a scalar; panics above 20 (i64 overflow guard).
pub fn factorial<S: Scalar>(n: u32) -> S {
    assert!(n <= 20, "factorial overflow guard: {n}! exceeds i64");
    let mut acc: i64 = 1;
    for k in 2..=i64::from(n) {
        acc *= k;
    }
    S::from_int(acc)
}
