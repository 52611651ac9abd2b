//! Canonical small models shared across the test suite, plus generators for
//! random diagonally-dominant rational models.
//!
//! - I1: M = 1, d = 2, J = 0
//! - I2: M = 2, D = diag(3, 3), J_{01} = J_{10} = 1
//! - I3: M = 3, D = 3·Id, J_{xy} = 1 for x != y

use crate::linalg::Matrix;
use crate::model::CouplingModel;
use crate::rng::SubRng;
use crate::scalar::{CRat, RealScalar, Scalar};
use num_rational::BigRational;
use num_traits::Zero;

pub fn i1<S: Scalar>() -> CouplingModel<S> {
    CouplingModel::new(vec![S::from_int(2)], Matrix::zeros(1, 1), None).unwrap()
}

pub fn i2<S: Scalar>() -> CouplingModel<S> {
    let j = Matrix::from_fn(2, 2, |i, k| {
        if i == k {
            S::zero()
        } else {
            S::one()
        }
    });
    CouplingModel::new(vec![S::from_int(3), S::from_int(3)], j, None).unwrap()
}

pub fn i3<S: Scalar>() -> CouplingModel<S> {
    let j = Matrix::from_fn(3, 3, |i, k| {
        if i == k {
            S::zero()
        } else {
            S::one()
        }
    });
    CouplingModel::new(vec![S::from_int(3); 3], j, None).unwrap()
}

pub fn all_fixtures<S: Scalar>() -> Vec<CouplingModel<S>> {
    vec![i1(), i2(), i3()]
}

fn brat(p: i64, q: i64) -> BigRational {
    <BigRational as RealScalar>::from_ratio(p, q)
}

/// Random model with d_x > 0 and J >= 0 real rational, diagonally dominant by
/// construction (d_x strictly exceeds the row sum of J). Suitable for every
/// Markov-chain hypothesis.
pub fn random_markov_model(rng: &mut SubRng, m: usize) -> CouplingModel<CRat> {
    let mut j_rows = vec![vec![CRat::zero(); m]; m];
    let mut row_sums = vec![brat(0, 1); m];
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            let num = rng.below(4) as i64; // 0..=3
            let entry = brat(num, 8);
            row_sums[x] = row_sums[x].clone() + entry.clone();
            j_rows[x][y] = CRat::from_real(entry);
        }
    }
    let diag: Vec<CRat> = (0..m)
        .map(|x| {
            let bump = brat(1 + rng.below(4) as i64, 2);
            CRat::from_real(row_sums[x].clone() + bump)
        })
        .collect();
    CouplingModel::new(diag, Matrix::from_rows(j_rows), None).unwrap()
}

/// Random model with complex rational couplings, diagonally dominant by the
/// crude bound |a+bi| <= |a|+|b|, real positive diagonal. Exercises complex
/// arithmetic in the Gaussian identities.
pub fn random_complex_model(rng: &mut SubRng, m: usize) -> CouplingModel<CRat> {
    let mut j_rows = vec![vec![CRat::zero(); m]; m];
    let mut row_bounds = vec![brat(0, 1); m];
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            let re = rng.below(5) as i64 - 2; // -2..=2
            let im = rng.below(5) as i64 - 2;
            row_bounds[x] =
                row_bounds[x].clone() + brat(re.abs() + im.abs(), 8);
            j_rows[x][y] = CRat::new_complex(brat(re, 8), brat(im, 8));
        }
    }
    let diag: Vec<CRat> = (0..m)
        .map(|x| {
            let bump = brat(1 + rng.below(3) as i64, 2);
            CRat::from_real(row_bounds[x].clone() + bump)
        })
        .collect();
    CouplingModel::new(diag, Matrix::from_rows(j_rows), None).unwrap()
}

/// Random invertible matrix with small rational entries (not necessarily a
/// coupling model); retries until the determinant is nonzero.
pub fn random_invertible_matrix(rng: &mut SubRng, n: usize) -> Matrix<CRat> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| {
            let num = rng.below(9) as i64 - 4; // -4..=4
            let den = 1 + rng.below(3) as i64; // 1..=3
            CRat::from_ratio(num, den)
        });
        if !m.det_bareiss().is_zero() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_markov_models_are_dominant(){
        let mut rng = SubRng::new(11);
        for m in 1..=5 {
            for _ in 0..5 {
                let model = random_markov_model(&mut rng, m);
                let rep = model.validate();
                assert!(rep.markov_ready(), "model failed validation: {rep:?}");
            }
        }
    }

    #[test]
    fn random_complex_models_are_dominant() {
        let mut rng = SubRng::new(12);
        for m in 1..=5 {
            for _ in 0..5 {
                let model = random_complex_model(&mut rng, m);
                let rep = model.validate();
                assert!(rep.series_ready(), "model failed validation: {rep:?}");
            }
        }
    }
}
