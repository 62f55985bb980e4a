//! Small dense matrices.
//!
//! Row-major storage. All dimensions in this crate are tiny (at most a dozen
//! rows), so nothing here is blocked or vectorized.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{Num, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        list.finish()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Matrix::from_fn(r1 - r0, c1 - c0, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), idx.len(), |r, c| self[(idx[r], idx[c])].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |r, c| if r == c { d[r].clone() } else { T::zero() })
    }

    pub fn diag_entries(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(r, k)].clone() * other[(k, c)].clone();
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() + other[(r, c)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| {
            self[(r, c)].clone() - other[(r, c)].clone()
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// `selfᵀ · f · self`, the change of basis of a Gram matrix.
    pub fn congruence(&self, f: &Self) -> Self {
        self.transpose().mul(f).mul(self)
    }

    /// `vᵀ · self · w`.
    pub fn bilinear(&self, v: &[T], w: &[T]) -> T {
        let mut acc = T::zero();
        for r in 0..self.rows {
            if v[r].is_zero() {
                continue;
            }
            let mut inner = T::zero();
            for c in 0..self.cols {
                inner = inner + self[(r, c)].clone() * w[c].clone();
            }
            acc = acc + v[r].clone() * inner;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|r| {
                let mut acc = T::zero();
                for c in 0..self.cols {
                    acc = acc + self[(r, c)].clone() * v[c].clone();
                }
                acc
            })
            .collect()
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let n = a.rows + b.rows;
        let m = a.cols + b.cols;
        Matrix::from_fn(n, m, |r, c| {
            if r < a.rows && c < a.cols {
                a[(r, c)].clone()
            } else if r >= a.rows && c >= a.cols {
                b[(r - a.rows, c - a.cols)].clone()
            } else {
                T::zero()
            }
        })
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (top, left) = (a.rows, a.cols);
        Matrix::from_fn(top + c.rows, left + b.cols, |r, col| match (r < top, col < left) {
            (true, true) => a[(r, col)].clone(),
            (true, false) => b[(r, col - left)].clone(),
            (false, true) => c[(r - top, col)].clone(),
            (false, false) => d[(r - top, col - left)].clone(),
        })
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Scalar> Matrix<T> {
    /// First off-diagonal pair violating symmetry, compared with `close_to`.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        for r in 0..self.rows {
            for c in r + 1..self.cols {
                if !self[(r, c)].close_to(&self[(c, r)], tol) {
                    return Err(Error::NotSymmetric { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    /// Determinant by Gaussian elimination with largest-pivot selection.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for k in 0..n {
            let Some(p) = pivot_row(&a, k) else {
                return T::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            let pivot = a[(k, k)].clone();
            det = det * pivot.clone();
            for r in k + 1..n {
                if a[(r, k)].is_zero() {
                    continue;
                }
                let factor = a[(r, k)].clone() / pivot.clone();
                for c in k..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(k, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Matrix<T> = Matrix::identity(n);
        for k in 0..n {
            let p = pivot_row(&a, k).ok_or(Error::Singular)?;
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            let pivot = a[(k, k)].clone();
            for c in 0..n {
                a[(k, c)] = a[(k, c)].clone() / pivot.clone();
                inv[(k, c)] = inv[(k, c)].clone() / pivot.clone();
            }
            for r in 0..n {
                if r == k || a[(r, k)].is_zero() {
                    continue;
                }
                let factor = a[(r, k)].clone();
                for c in 0..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(k, c)].clone();
                    a[(r, c)] = v;
                    let w = inv[(r, c)].clone() - factor.clone() * inv[(k, c)].clone();
                    inv[(r, c)] = w;
                }
            }
        }
        Ok(inv)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    /// Largest absolute entry, as a float; used to scale tolerances.
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn close_to(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.close_to(b, tol))
    }
}

fn pivot_row<T: Scalar>(a: &Matrix<T>, k: usize) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for r in k..a.rows {
        let v = a[(r, k)].abs();
        if v.is_zero() {
            continue;
        }
        if T::EXACT {
            return Some(r);
        }
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((r, v));
        }
    }
    best.map(|(r, _)| r)
}

impl Matrix<i64> {
    pub fn cast<T: Scalar>(&self) -> Matrix<T> {
        self.map(|&x| T::from_i64(x))
    }

    /// Exact determinant of an integer matrix.
    pub fn det_exact(&self) -> Rational {
        self.cast::<Rational>().det()
    }

    /// Inverse of a unimodular matrix, again integral.
    pub fn unimodular_inverse(&self) -> Result<Matrix<i64>> {
        let inv = self.cast::<Rational>().inverse()?;
        let mut out = Matrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = &inv[(r, c)];
                if !v.is_integer() {
                    return Err(Error::InvalidParameter(
                        "matrix is not unimodular".into(),
                    ));
                }
                out[(r, c)] = v.round_i64();
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.det(), int(1));
        let inv = a.inverse().unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert_eq!(a.mul(&inv), Matrix::identity(2));

        let b = m(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(b.det(), int(-2));
        assert_eq!(b.mul(&b.inverse().unwrap()), Matrix::identity(3));

        let singular = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(singular.det(), int(0));
        assert_eq!(singular.inverse(), Err(Error::Singular));
    }

    #[test]
    fn blocks_and_congruence() {
        let a = m(&[&[1]]);
        let b = m(&[&[2, 1], &[1, 2]]);
        let d = Matrix::block_diag(&a, &b);
        assert_eq!(d, m(&[&[1, 0, 0], &[0, 2, 1], &[0, 1, 2]]));
        let u = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(u.congruence(&Matrix::identity(2)), m(&[&[1, 1], &[1, 2]]));
        assert_eq!(b.bilinear(&[int(1), int(-1)], &[int(1), int(-1)]), int(2));
        assert_eq!(d.principal(&[1, 2]), b);
        assert_eq!(a.scale(&rat(1, 2)), Matrix::from_rows(vec![vec![rat(1, 2)]]).unwrap());
    }

    #[test]
    fn unimodular_inverse_is_integral() {
        let u = Matrix::from_rows(vec![vec![2i64, 1], vec![1, 1]]).unwrap();
        let v = u.unimodular_inverse().unwrap();
        assert_eq!(u.mul(&v), Matrix::identity(2));
        let w = Matrix::from_rows(vec![vec![2i64, 0], vec![0, 1]]).unwrap();
        assert!(w.unimodular_inverse().is_err());
    }

    #[test]
    fn float_inverse_pivots() {
        let a = Matrix::from_rows(vec![vec![1e-12, 1.0], vec![1.0, 1.0]]).unwrap();
        let inv = a.inverse().unwrap();
        let prod = a.mul(&inv);
        assert!(prod.close_to(&Matrix::identity(2), 1e-9));
    }
}
