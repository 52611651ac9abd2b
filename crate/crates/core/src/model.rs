//! Site set, coupling matrices, hypothesis validation, and exact covariances.
//!
//! A [`CouplingModel`] holds the diagonal matrix D (entries `d_x`), the
//! off-diagonal coupling matrix J, and an optional diagonal potential V over
//! the site set {0, ..., M-1}. Everything downstream — walk sums, Gaussian
//! expectations, Markov chains — is driven by the quadratic form A = D - J
//! (or D + V - J) and its inverse, the covariance C.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{RealScalar, Scalar, C64, PIVOT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingModel<S: Scalar> {
    size: usize,
    diag: Vec<S>,
    offdiag: Matrix<S>,
    potential: Vec<S>,
}

impl<S: Scalar> CouplingModel<S> {
    /// Builds a model from D, J and an optional potential V.
    ///
    /// Shape is enforced here; the mathematical hypotheses (zero diagonal of
    /// J, diagonal dominance, ...) are reported by [`CouplingModel::validate`]
    /// rather than rejected, so that ill-posed inputs still produce a report.
    pub fn new(diag: Vec<S>, offdiag: Matrix<S>, potential: Option<Vec<S>>) -> Result<Self> {
        let size = diag.len();
        if size == 0 {
            return Err(Error::Dimension("empty site set".into()));
        }
        if offdiag.n_rows() != size || offdiag.n_cols() != size {
            return Err(Error::Dimension(format!(
                "J must be {size}x{size}, got {}x{}",
                offdiag.n_rows(),
                offdiag.n_cols()
            )));
        }
        let potential = potential.unwrap_or_else(|| vec![S::zero(); size]);
        if potential.len() != size {
            return Err(Error::Dimension(format!(
                "potential must have {size} entries, got {}",
                potential.len()
            )));
        }
        Ok(CouplingModel {
            size,
            diag,
            offdiag,
            potential,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn d(&self, x: usize) -> &S {
        &self.diag[x]
    }

    pub fn j(&self, x: usize, y: usize) -> &S {
        self.offdiag.get(x, y)
    }

    pub fn v(&self, x: usize) -> &S {
        &self.potential[x]
    }

    pub fn j_matrix(&self) -> &Matrix<S> {
        &self.offdiag
    }

    /// The quadratic form A = D - J.
    pub fn quadratic_form(&self) -> QuadraticForm<S> {
        let a = Matrix::from_fn(self.size, self.size, |i, j| {
            if i == j {
                self.diag[i].clone() - self.offdiag.get(i, j).clone()
            } else {
                -self.offdiag.get(i, j).clone()
            }
        });
        QuadraticForm::new(a)
    }

    /// The quadratic form A = D + V - J.
    pub fn quadratic_form_with_potential(&self) -> QuadraticForm<S> {
        let a = Matrix::from_fn(self.size, self.size, |i, j| {
            if i == j {
                self.diag[i].clone() + self.potential[i].clone()
                    - self.offdiag.get(i, j).clone()
            } else {
                -self.offdiag.get(i, j).clone()
            }
        });
        QuadraticForm::new(a)
    }

    /// Same model with every diagonal entry shifted by `shift` (D + shift*I).
    pub fn shifted_diag(&self, shift: &S) -> CouplingModel<S> {
        CouplingModel {
            size: self.size,
            diag: self.diag.iter().map(|d| d.clone() + shift.clone()).collect(),
            offdiag: self.offdiag.clone(),
            potential: self.potential.clone(),
        }
    }

    pub fn to_float(&self) -> CouplingModel<C64> {
        CouplingModel {
            size: self.size,
            diag: self.diag.iter().map(Scalar::to_c64).collect(),
            offdiag: Matrix::from_fn(self.size, self.size, |i, j| self.offdiag.get(i, j).to_c64()),
            potential: self.potential.iter().map(Scalar::to_c64).collect(),
        }
    }

    /// Checks every hypothesis the representation theorems use and reports
    /// pass/fail per hypothesis. Pure: no state, no errors.
    pub fn validate(&self) -> ValidationReport<S::Real> {
        let zero_diag_j = (0..self.size).all(|x| self.offdiag.get(x, x).is_zero());
        let diag_nonzero = self.diag.iter().all(|d| !d.is_zero());

        // contraction ratio rho = max_x sum_y |J_xy / d_x| (certified upper bound)
        let rho = if diag_nonzero {
            let mut worst = S::Real::zero();
            for x in 0..self.size {
                let d_inv = self.diag[x].try_inv().expect("nonzero diagonal");
                let mut row = S::Real::zero();
                for y in 0..self.size {
                    let q = self.offdiag.get(x, y).clone() * d_inv.clone();
                    row = row + q.abs_upper();
                }
                if row > worst {
                    worst = row;
                }
            }
            Some(worst)
        } else {
            None
        };
        let dominant = rho.as_ref().is_some_and(|r| *r < S::Real::one());

        let hermitian = self.quadratic_form().hermitian_positive();

        let markov = (0..self.size).all(|x| {
            let d = &self.diag[x];
            d.is_real() && d.re() > S::Real::zero()
        }) && (0..self.size).all(|x| {
            (0..self.size).all(|y| {
                let j = self.offdiag.get(x, y);
                j.is_real() && j.re() >= S::Real::zero()
            })
        });

        ValidationReport {
            zero_diag_j,
            diag_nonzero,
            diagonally_dominant: dominant,
            rho,
            hermitian_part_positive: hermitian,
            markov_positive: markov,
        }
    }
}

/// Per-hypothesis validation outcome. `rho` is the contraction ratio
/// max_x sum_y |J_xy/d_x| (a certified upper bound in exact mode), `None`
/// when some d_x = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<R> {
    pub zero_diag_j: bool,
    pub diag_nonzero: bool,
    pub diagonally_dominant: bool,
    pub rho: Option<R>,
    pub hermitian_part_positive: Positivity,
    pub markov_positive: bool,
}

impl<R> ValidationReport<R> {
    /// Hypotheses of the walk-series theorem: zero diagonal + dominance.
    pub fn series_ready(&self) -> bool {
        self.zero_diag_j && self.diag_nonzero && self.diagonally_dominant
    }

    /// Hypotheses of the Markov-chain representations.
    pub fn markov_ready(&self) -> bool {
        self.series_ready() && self.markov_positive
    }
}

/// Outcome of a positive-definiteness certification.
///
/// Float mode reports [`Positivity::Indeterminate`] when a pivot falls inside
/// the threshold band instead of guessing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    NotPositive,
    Indeterminate,
}

impl Positivity {
    pub fn is_positive(self) -> bool {
        self == Positivity::Positive
    }
}

/// A quadratic form: any square matrix A, with its hypothesis flags cached
/// at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<S: Scalar> {
    entries: Matrix<S>,
    hermitian_positive: Positivity,
    dominance_rho: Option<S::Real>,
}

impl<S: Scalar> QuadraticForm<S> {
    pub fn new(entries: Matrix<S>) -> Self {
        assert!(entries.is_square(), "quadratic form must be square");
        let hermitian_positive = certify_hermitian_positive(&entries);
        let dominance_rho = offdiag_ratio(&entries);
        QuadraticForm {
            entries,
            hermitian_positive,
            dominance_rho,
        }
    }

    pub fn size(&self) -> usize {
        self.entries.n_rows()
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    /// Cached positive-Hermitian-part certificate for (A + A^†)/2.
    pub fn hermitian_positive(&self) -> Positivity {
        self.hermitian_positive
    }

    /// Cached contraction ratio reading diag(A) as D and -offdiag(A) as J.
    pub fn dominance_rho(&self) -> Option<&S::Real> {
        self.dominance_rho.as_ref()
    }

    pub fn is_diagonally_dominant(&self) -> bool {
        self.dominance_rho
            .as_ref()
            .is_some_and(|r| *r < S::Real::one())
    }
}

/// True iff the Hermitian part of A is positive definite.
pub fn hermitian_part_positive<S: Scalar>(form: &QuadraticForm<S>) -> bool {
    form.hermitian_positive().is_positive()
}

fn offdiag_ratio<S: Scalar>(a: &Matrix<S>) -> Option<S::Real> {
    let n = a.n_rows();
    let mut worst = S::Real::zero();
    for x in 0..n {
        let d_inv = a.get(x, x).try_inv()?;
        let mut row = S::Real::zero();
        for y in 0..n {
            if y == x {
                continue;
            }
            let q = a.get(x, y).clone() * d_inv.clone();
            row = row + q.abs_upper();
        }
        if row > worst {
            worst = row;
        }
    }
    Some(worst)
}

/// Positive-definiteness of the Hermitian part.
///
/// Exact mode: Sylvester's criterion on leading principal minors, decided
/// exactly. Float mode: LDL^† pivots against the `PIVOT_TOL` band.
fn certify_hermitian_positive<S: Scalar>(a: &Matrix<S>) -> Positivity {
    let h = a.hermitian_part();
    let n = h.n_rows();
    if S::EXACT {
        for k in 1..=n {
            let idx: Vec<usize> = (0..k).collect();
            let minor = h.select(&idx, &idx).det_bareiss();
            // Hermitian matrices have real minors; rounding can't occur here.
            debug_assert!(minor.im().is_zero());
            if !(minor.re() > S::Real::zero()) {
                return Positivity::NotPositive;
            }
        }
        Positivity::Positive
    } else {
        // LDL^† without pivoting; a pivot inside the threshold band is
        // reported indeterminate rather than guessed.
        let scale = h.max_abs_upper().to_f64().max(1.0);
        let band = scale * PIVOT_TOL;
        let mut m = h.clone();
        for k in 0..n {
            let piv = m.get(k, k).re().to_f64();
            if piv.abs() <= band {
                return Positivity::Indeterminate;
            }
            if piv < 0.0 {
                return Positivity::NotPositive;
            }
            let piv_inv = m.get(k, k).try_inv().expect("nonzero pivot");
            for i in k + 1..n {
                let factor = m.get(i, k).clone() * piv_inv.clone();
                for j in k + 1..n {
                    let v = m.get(i, j).clone() - factor.clone() * m.get(k, j).conj();
                    m.set(i, j, v);
                }
            }
        }
        Positivity::Positive
    }
}

/// The covariance C = A^{-1}, retaining its generating form.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance<S: Scalar> {
    entries: Matrix<S>,
    source: QuadraticForm<S>,
}

impl<S: Scalar> Covariance<S> {
    pub fn size(&self) -> usize {
        self.entries.n_rows()
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> &S {
        self.entries.get(a, b)
    }

    pub fn source(&self) -> &QuadraticForm<S> {
        &self.source
    }
}

/// Inverts the quadratic form. Exact in rational mode; in float mode the
/// residual ||AC - I||_max must come out below 1e-12 or the matrix is
/// reported singular.
pub fn covariance<S: Scalar>(form: &QuadraticForm<S>) -> Result<Covariance<S>> {
    let inv = form.entries().inverse()?;
    if !S::EXACT {
        let res = form.entries().residual_vs_identity(&inv);
        if res >= 1e-12 {
            return Err(Error::Singular(format!(
                "inverse residual {res:.3e} exceeds 1e-12"
            )));
        }
    }
    Ok(Covariance {
        entries: inv,
        source: form.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::CRat;
    use num_rational::BigRational;

    fn brat(p: i64, q: i64) -> BigRational {
        <BigRational as RealScalar>::from_ratio(p, q)
    }

    #[test]
    fn validate_i1_all_pass_rho_zero() {
        let m = fixtures::i1::<CRat>();
        let rep = m.validate();
        assert!(rep.zero_diag_j);
        assert!(rep.diag_nonzero);
        assert!(rep.diagonally_dominant);
        assert_eq!(rep.rho, Some(brat(0, 1)));
        assert!(rep.hermitian_part_positive.is_positive());
        assert!(rep.markov_positive);
        assert!(rep.markov_ready());
    }

    #[test]
    fn validate_i2_rho_one_third() {
        // oracle: direct evaluation of the max-row-sum formula
        let m = fixtures::i2::<CRat>();
        let rep = m.validate();
        assert!(rep.series_ready());
        assert_eq!(rep.rho, Some(brat(1, 3)));
    }

    #[test]
    fn validate_dominance_failure_rho_two() {
        let j = Matrix::from_rows(vec![
            vec![CRat::from_int(0), CRat::from_int(2)],
            vec![CRat::from_int(2), CRat::from_int(0)],
        ]);
        let m = CouplingModel::new(vec![CRat::from_int(1), CRat::from_int(1)], j, None).unwrap();
        let rep = m.validate();
        assert!(!rep.diagonally_dominant);
        assert_eq!(rep.rho, Some(brat(2, 1)));
    }

    #[test]
    fn validate_is_pure() {
        let m = fixtures::i3::<CRat>();
        assert_eq!(m.validate(), m.validate());
    }

    #[test]
    fn covariance_i1_scalar_inverse() {
        let m = fixtures::i1::<CRat>();
        let c = covariance(&m.quadratic_form()).unwrap();
        assert_eq!(*c.get(0, 0), CRat::from_ratio(1, 2));
    }

    #[test]
    fn covariance_i2_adjugate_oracle() {
        // 2x2 adjugate oracle: inv([[a,b],[c,d]]) = [[d,-b],[-c,a]]/det
        let m = fixtures::i2::<CRat>();
        let form = m.quadratic_form();
        let a = form.entries();
        let det = a.get(0, 0).clone() * a.get(1, 1).clone()
            - a.get(0, 1).clone() * a.get(1, 0).clone();
        let det_inv = det.try_inv().unwrap();
        let c = covariance(&form).unwrap();
        assert_eq!(*c.get(0, 0), a.get(1, 1).clone() * det_inv.clone());
        assert_eq!(*c.get(0, 1), -a.get(0, 1).clone() * det_inv.clone());
        // frozen values
        assert_eq!(*c.get(0, 0), CRat::from_ratio(3, 8));
        assert_eq!(*c.get(0, 1), CRat::from_ratio(1, 8));
        assert_eq!(*c.get(1, 0), CRat::from_ratio(1, 8));
        assert_eq!(*c.get(1, 1), CRat::from_ratio(3, 8));
    }

    #[test]
    fn covariance_i3_adjugate_oracle() {
        // 3x3 cofactor oracle, frozen: det 16, C = (1/16)[[8,4,4],[4,8,4],[4,4,8]]
        let m = fixtures::i3::<CRat>();
        let form = m.quadratic_form();
        assert_eq!(form.entries().det_naive(), CRat::from_int(16));
        let c = covariance(&form).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j {
                    CRat::from_ratio(8, 16)
                } else {
                    CRat::from_ratio(4, 16)
                };
                assert_eq!(*c.get(i, j), expect);
            }
        }
    }

    #[test]
    fn covariance_exact_identity() {
        let m = fixtures::i3::<CRat>();
        let form = m.quadratic_form();
        let c = covariance(&form).unwrap();
        assert_eq!(form.entries().mul(c.entries()), Matrix::identity(3));
    }

    #[test]
    fn covariance_float_residual() {
        let m = fixtures::i3::<CRat>().to_float();
        let c = covariance(&m.quadratic_form()).unwrap();
        assert!(
            m.quadratic_form()
                .entries()
                .residual_vs_identity(c.entries())
                < 1e-12
        );
    }

    #[test]
    fn covariance_singular_error() {
        let j = Matrix::from_rows(vec![
            vec![CRat::from_int(0), CRat::from_int(1)],
            vec![CRat::from_int(1), CRat::from_int(0)],
        ]);
        let m = CouplingModel::new(vec![CRat::from_int(1), CRat::from_int(1)], j, None).unwrap();
        // A = [[1,-1],[-1,1]] is singular
        assert!(covariance(&m.quadratic_form()).is_err());
    }

    #[test]
    fn hermitian_part_positive_examples() {
        // I1: positive scalar
        let m = fixtures::i1::<CRat>();
        assert!(hermitian_part_positive(&m.quadratic_form()));

        // skew off-diagonal drops out of the Hermitian part
        let skew = QuadraticForm::new(Matrix::from_rows(vec![
            vec![CRat::from_int(1), CRat::from_int(3)],
            vec![CRat::from_int(-3), CRat::from_int(1)],
        ]));
        assert!(hermitian_part_positive(&skew));
        assert_eq!(
            skew.entries().hermitian_part(),
            Matrix::identity(2)
        );

        // minor 1 - 16 < 0
        let indef = QuadraticForm::new(Matrix::from_rows(vec![
            vec![CRat::from_int(1), CRat::from_int(4)],
            vec![CRat::from_int(4), CRat::from_int(1)],
        ]));
        assert!(!hermitian_part_positive(&indef));
    }

    #[test]
    fn hermitian_float_matches_exact() {
        for m in [fixtures::i1::<CRat>(), fixtures::i2(), fixtures::i3()] {
            let exact = m.quadratic_form().hermitian_positive();
            let float = m.to_float().quadratic_form().hermitian_positive();
            assert_eq!(exact, float);
        }
    }
}
