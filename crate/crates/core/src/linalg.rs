//! Dense matrices over a [`Scalar`] with the two independent routes the
//! verification suite leans on: fraction-free elimination vs. cofactor
//! expansion for determinants, and Ryser inclusion-exclusion vs. permutation
//! enumeration for permanents.

use crate::error::{Error, Result};
use crate::exec;
use crate::scalar::{RealScalar, Scalar, PIVOT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == n_cols),
            "ragged matrix rows"
        );
        Matrix {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let acc = out.get(i, j).clone() + a.clone() * other.get(k, j).clone();
                    out.set(i, j, acc);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() + other.get(i, j).clone()
        })
    }

    pub fn sub(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).clone() - other.get(i, j).clone()
        })
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        Matrix::from_fn(self.rows, self.cols, |i, j| s.clone() * self.get(i, j).clone())
    }

    pub fn conj_transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// (A + A^†)/2.
    pub fn hermitian_part(&self) -> Matrix<S> {
        assert!(self.is_square());
        let half = S::from_ratio(1, 2);
        self.add(&self.conj_transpose()).scale(&half)
    }

    /// Submatrix selecting the given rows and columns (repeats allowed).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<S> {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Matrix with the given rows and columns removed.
    pub fn delete(&self, drop_rows: &[usize], drop_cols: &[usize]) -> Matrix<S> {
        let keep_rows: Vec<usize> = (0..self.rows).filter(|i| !drop_rows.contains(i)).collect();
        let keep_cols: Vec<usize> = (0..self.cols).filter(|j| !drop_cols.contains(j)).collect();
        self.select(&keep_rows, &keep_cols)
    }

    /// Largest |entry| (certified upper bound in exact mode).
    pub fn max_abs_upper(&self) -> S::Real {
        let mut best = S::Real::zero();
        for v in &self.data {
            let a = v.abs_upper();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det_bareiss(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return S::one();
        }
        let mut a = self.clone();
        let mut prev = S::one();
        let mut sign = S::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                // pivot search below row k
                let Some(p) = (k + 1..n).find(|&p| !a.get(p, k).is_zero()) else {
                    return S::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            let prev_inv = match prev.try_inv() {
                Some(v) => v,
                None => return S::zero(),
            };
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.get(k, k).clone() * a.get(i, j).clone()
                        - a.get(i, k).clone() * a.get(k, j).clone();
                    a.set(i, j, num * prev_inv.clone());
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }

    /// Determinant by cofactor expansion; independent oracle for `det_bareiss`.
    pub fn det_naive(&self) -> S {
        assert!(self.is_square());
        let cols: Vec<usize> = (0..self.cols).collect();
        self.det_naive_rec(0, &cols)
    }

    fn det_naive_rec(&self, row: usize, cols: &[usize]) -> S {
        if cols.is_empty() {
            return S::one();
        }
        let mut acc = S::zero();
        let mut sign = S::one();
        for &j in cols {
            let a = self.get(row, j);
            if !a.is_zero() {
                let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != j).collect();
                acc = acc + sign.clone() * a.clone() * self.det_naive_rec(row + 1, &rest);
            }
            sign = -sign;
        }
        acc
    }

    /// Permanent by Ryser's inclusion-exclusion with Gray-code column updates.
    /// The subset space is split into fixed chunks so the reduction order is
    /// independent of thread count.
    pub fn permanent_ryser(&self) -> Result<S> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Ok(S::one());
        }
        if n > 24 {
            return Err(Error::SizeLimit(format!(
                "permanent of a {n}x{n} matrix (Ryser cap 24)"
            )));
        }
        let total: u64 = 1u64 << n;
        let chunk: u64 = 1 << 14;
        let n_chunks = exec::chunk_count(total as usize, chunk as usize);
        let partials = exec::map_collect(n_chunks, |c| {
            let start = (c as u64 * chunk).max(1);
            let end = ((c as u64 + 1) * chunk).min(total);
            self.ryser_range(start, end)
        });
        let mut acc = S::zero();
        for p in partials {
            acc = acc + p;
        }
        // global (-1)^n prefactor
        if n % 2 == 1 {
            acc = -acc;
        }
        Ok(acc)
    }

    fn ryser_range(&self, start: u64, end: u64) -> S {
        let n = self.rows;
        let mut acc = S::zero();
        if start >= end {
            return acc;
        }
        let mut subset = start ^ (start >> 1);
        let mut row_sums: Vec<S> = (0..n)
            .map(|i| {
                let mut s = S::zero();
                for j in 0..n {
                    if subset >> j & 1 == 1 {
                        s = s + self.get(i, j).clone();
                    }
                }
                s
            })
            .collect();
        for s in start..end {
            if s != start {
                let bit = s.trailing_zeros() as usize;
                let next = s ^ (s >> 1);
                let added = next >> bit & 1 == 1;
                for (i, rs) in row_sums.iter_mut().enumerate() {
                    let v = self.get(i, bit).clone();
                    *rs = if added {
                        rs.clone() + v
                    } else {
                        rs.clone() - v
                    };
                }
                subset = next;
            }
            let mut prod = S::one();
            for rs in &row_sums {
                if rs.is_zero() {
                    prod = S::zero();
                    break;
                }
                prod = prod * rs.clone();
            }
            if subset.count_ones() % 2 == 1 {
                acc = acc - prod;
            } else {
                acc = acc + prod;
            }
        }
        acc
    }

    /// Permanent by direct permutation enumeration; oracle for Ryser.
    pub fn permanent_naive(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut used = vec![false; n];
        self.perm_naive_rec(0, &mut used)
    }

    fn perm_naive_rec(&self, row: usize, used: &mut [bool]) -> S {
        let n = self.rows;
        if row == n {
            return S::one();
        }
        let mut acc = S::zero();
        for j in 0..n {
            if used[j] || self.get(row, j).is_zero() {
                continue;
            }
            used[j] = true;
            acc = acc + self.get(row, j).clone() * self.perm_naive_rec(row + 1, used);
            used[j] = false;
        }
        acc
    }

    /// Inverse by Gauss-Jordan elimination with max-|pivot| selection.
    ///
    /// Errors with [`Error::Singular`] on a zero pivot (exact mode) or a
    /// pivot below the relative threshold (float mode).
    pub fn inverse(&self) -> Result<Matrix<S>> {
        assert!(self.is_square());
        let n = self.rows;
        let scale = self.max_abs_upper().to_f64().max(1.0);
        let threshold_sq = (scale * PIVOT_TOL).powi(2);

        let mut a = self.clone();
        let mut inv: Matrix<S> = Matrix::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&p, &q| {
                    a.get(p, col)
                        .abs_sq()
                        .partial_cmp(&a.get(q, col).abs_sq())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("nonempty pivot range");
            let piv_sq = a.get(pivot_row, col).abs_sq();
            if piv_sq.is_zero() || (!S::EXACT && piv_sq.to_f64() <= threshold_sq) {
                return Err(Error::Singular(format!(
                    "zero pivot in column {col} during elimination"
                )));
            }
            a.swap_rows(col, pivot_row);
            inv.swap_rows(col, pivot_row);
            let piv_inv = a
                .get(col, col)
                .try_inv()
                .ok_or_else(|| Error::Singular(format!("uninvertible pivot in column {col}")))?;
            for j in 0..n {
                let v = a.get(col, j).clone() * piv_inv.clone();
                a.set(col, j, v);
                let w = inv.get(col, j).clone() * piv_inv.clone();
                inv.set(col, j, w);
            }
            for i in 0..n {
                if i == col || a.get(i, col).is_zero() {
                    continue;
                }
                let factor = a.get(i, col).clone();
                for j in 0..n {
                    let v = a.get(i, j).clone() - factor.clone() * a.get(col, j).clone();
                    a.set(i, j, v);
                    let w = inv.get(i, j).clone() - factor.clone() * inv.get(col, j).clone();
                    inv.set(i, j, w);
                }
            }
        }
        Ok(inv)
    }

    /// max |(self * other - I)_{ij}| as an f64, for float-mode residual checks.
    pub fn residual_vs_identity(&self, other: &Matrix<S>) -> f64 {
        let prod = self.mul(other);
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { S::one() } else { S::zero() };
                let d = prod.get(i, j).clone() - target;
                worst = worst.max(d.abs_sq().to_f64().sqrt());
            }
        }
        worst
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

/// Sign of the permutation sorting `perm` (counted by inversions); `perm`
/// must be a permutation of 0..n.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{C64, CRat};

    fn rat(p: i64, q: i64) -> CRat {
        CRat::from_ratio(p, q)
    }

    fn mat_i64(rows: &[&[i64]]) -> Matrix<CRat> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| CRat::from_int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn det_routes_agree() {
        let m = mat_i64(&[&[3, -1], &[-1, 3]]);
        assert_eq!(m.det_bareiss(), CRat::from_int(8));
        assert_eq!(m.det_naive(), CRat::from_int(8));
        let m3 = mat_i64(&[&[3, -1, -1], &[-1, 3, -1], &[-1, -1, 3]]);
        assert_eq!(m3.det_bareiss(), CRat::from_int(16));
        assert_eq!(m3.det_naive(), CRat::from_int(16));
    }

    #[test]
    fn det_with_zero_leading_pivot() {
        let m = mat_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.det_bareiss(), CRat::from_int(-1));
        assert_eq!(m.det_naive(), CRat::from_int(-1));
    }

    #[test]
    fn permanent_routes_agree() {
        let m = mat_i64(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(m.permanent_ryser().unwrap(), CRat::from_int(450));
        assert_eq!(m.permanent_naive(), CRat::from_int(450));
    }

    #[test]
    fn permanent_of_empty_is_one() {
        let m: Matrix<CRat> = Matrix::zeros(0, 0);
        assert_eq!(m.permanent_ryser().unwrap(), CRat::from_int(1));
        assert_eq!(m.permanent_naive(), CRat::from_int(1));
    }

    #[test]
    fn inverse_exact() {
        let m = mat_i64(&[&[3, -1], &[-1, 3]]);
        let inv = m.inverse().unwrap();
        assert_eq!(*inv.get(0, 0), rat(3, 8));
        assert_eq!(*inv.get(0, 1), rat(1, 8));
        assert_eq!(m.mul(&inv), Matrix::identity(2));
    }

    #[test]
    fn inverse_singular_errors() {
        let m = mat_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(m.inverse(), Err(Error::Singular(_))));
    }

    #[test]
    fn inverse_float_residual() {
        let m: Matrix<C64> = Matrix::from_rows(vec![
            vec![C64::from_int(3), C64::from_int(-1)],
            vec![C64::from_int(-1), C64::from_int(3)],
        ]);
        let inv = m.inverse().unwrap();
        assert!(m.residual_vs_identity(&inv) < 1e-12);
    }

    #[test]
    fn permutation_sign_basics() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[2, 0, 1]), 1);
    }
}
