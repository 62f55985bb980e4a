use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `Y = Bᵀ·diag(d)·B` with `B` unit upper triangular.
///
/// Row `k` of `B` holds the Gram–Schmidt coefficients of later basis vectors
/// against the `k`-th orthogonalized vector, and `d[k]` is that vector's
/// squared length.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiDecomposition<T> {
    pub b: Matrix<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> JacobiDecomposition<T> {
    pub fn recompose(&self) -> Matrix<T> {
        self.b.congruence(&Matrix::diagonal(&self.d))
    }
}

/// Fails with the order of the first leading principal minor that is not
/// positive.
pub fn jacobi_decompose<T: Scalar>(y: &Matrix<T>) -> Result<JacobiDecomposition<T>> {
    if !y.is_square() {
        return Err(Error::NotSquare {
            rows: y.rows(),
            cols: y.cols(),
        });
    }
    let n = y.rows();
    let mut b = Matrix::<T>::identity(n);
    let mut d: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        let mut di = y[(i, i)].clone();
        for k in 0..i {
            di = di - d[k].clone() * b[(k, i)].clone() * b[(k, i)].clone();
        }
        if di <= T::zero() {
            return Err(Error::NotPositiveDefinite { minor: i + 1 });
        }
        for j in i + 1..n {
            let mut v = y[(i, j)].clone();
            for k in 0..i {
                v = v - d[k].clone() * b[(k, i)].clone() * b[(k, j)].clone();
            }
            b[(i, j)] = v / di.clone();
        }
        d.push(di);
    }
    Ok(JacobiDecomposition { b, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn m(rows: Vec<Vec<Rational>>) -> Matrix<Rational> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_and_diagonal() {
        let id = Matrix::<Rational>::identity(2);
        let jd = jacobi_decompose(&id).unwrap();
        assert_eq!(jd.b, id);
        assert_eq!(jd.d, vec![int(1), int(1)]);

        let diag = Matrix::diagonal(&[rat(3, 2), int(7)]);
        let jd = jacobi_decompose(&diag).unwrap();
        assert_eq!(jd.b, Matrix::identity(2));
        assert_eq!(jd.d, vec![rat(3, 2), int(7)]);
    }

    #[test]
    fn two_by_two_example() {
        let y = m(vec![vec![int(2), int(1)], vec![int(1), int(1)]]);
        let jd = jacobi_decompose(&y).unwrap();
        assert_eq!(jd.b, m(vec![vec![int(1), rat(1, 2)], vec![int(0), int(1)]]));
        assert_eq!(jd.d, vec![int(2), rat(1, 2)]);
        // Bᵀ D B expanded by hand: [[2, 2·½], [2·½, 2·¼ + ½]].
        assert_eq!(jd.recompose(), y);
    }

    #[test]
    fn reports_failing_minor() {
        let y = m(vec![vec![int(1), int(2)], vec![int(2), int(1)]]);
        assert_eq!(
            jacobi_decompose(&y),
            Err(Error::NotPositiveDefinite { minor: 2 })
        );
        let z = m(vec![vec![int(0)]]);
        assert_eq!(
            jacobi_decompose(&z),
            Err(Error::NotPositiveDefinite { minor: 1 })
        );
    }
}
