//! GL(n,ℤ)-equivalence and homothety of forms.
//!
//! Both forms are LLL-reduced; a witness is then built column by column from
//! short vectors of the first form whose lengths and mutual inner products
//! match the Gram entries of the second. Equal determinants make any full
//! match unimodular, so exhausting the search certifies inequivalence.

use super::{lll_reduce_matrix, short_vectors, QuadraticForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Relative tolerance used by [`is_equivalent`] for float forms.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

/// `Uᵀ·(c·f1)·U = f2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Homothety<T> {
    pub scale: f64,
    /// Present when `c` is representable in the form's arithmetic.
    pub exact_scale: Option<T>,
    pub witness: Matrix<i64>,
}

/// Returns `U` unimodular with `Uᵀ·f1·U = f2`, or `None` if none exists.
pub fn is_equivalent<T: Scalar>(
    f1: &QuadraticForm<T>,
    f2: &QuadraticForm<T>,
) -> Result<Option<Matrix<i64>>> {
    is_equivalent_tol(f1, f2, DEFAULT_FLOAT_TOL)
}

/// Float forms are compared entrywise up to `tol` times the largest entry;
/// exact forms ignore `tol`.
pub fn is_equivalent_tol<T: Scalar>(
    f1: &QuadraticForm<T>,
    f2: &QuadraticForm<T>,
    tol: f64,
) -> Result<Option<Matrix<i64>>> {
    let n = f1.dim();
    if f2.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f2.dim(),
        });
    }
    if n == 0 {
        return Ok(Some(Matrix::identity(0)));
    }
    let scale = f1.gram().max_abs().max(f2.gram().max_abs());
    let abs_tol = tol * scale;
    let close = |a: &T, b: &T| a.close_to(b, abs_tol);

    let (d1, d2) = (f1.det(), f2.det());
    let det_ok = if T::EXACT {
        d1 == d2
    } else {
        let (a, b) = (d1.to_f64(), d2.to_f64());
        (a - b).abs() <= 10.0 * n as f64 * tol * a.abs().max(b.abs())
    };
    if !det_ok {
        return Ok(None);
    }

    let delta = T::from_i64(99) / T::from_i64(100);
    let (r1, w1) = lll_reduce_matrix(f1.gram(), &delta);
    let (r2, w2) = lll_reduce_matrix(f2.gram(), &delta);
    let r1_form = QuadraticForm::from_trusted(r1.clone());

    let max_diag = (0..n)
        .map(|i| r2[(i, i)].clone())
        .reduce(|a, b| if b > a { b } else { a })
        .expect("n ≥ 1");
    let bound = if T::EXACT {
        max_diag
    } else {
        max_diag + T::approximate(abs_tol)
    };
    let candidates: Vec<Vec<T>> = short_vectors(&r1_form, &bound)
        .into_iter()
        .map(|(v, _)| v.iter().map(|&x| T::from_i64(x)).collect())
        .collect();
    let per_column: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..candidates.len())
                .filter(|&k| close(&r1.bilinear(&candidates[k], &candidates[k]), &r2[(i, i)]))
                .collect()
        })
        .collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    if !backtrack(&r1, &r2, &candidates, &per_column, &mut chosen, &close) {
        return Ok(None);
    }
    let v = Matrix::from_fn(n, n, |r, c| candidates[chosen[c]][r].to_f64().round() as i64);
    if num_traits::Signed::abs(&v.det_exact()) != num_traits::One::one() {
        // Only reachable through float tolerance with unequal determinants.
        return Ok(None);
    }
    let u = w1.mul(&v).mul(&w2.unimodular_inverse()?);
    Ok(Some(u))
}

fn backtrack<T: Scalar>(
    r1: &Matrix<T>,
    r2: &Matrix<T>,
    candidates: &[Vec<T>],
    per_column: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    close: &dyn Fn(&T, &T) -> bool,
) -> bool {
    let i = chosen.len();
    if i == per_column.len() {
        return true;
    }
    for &k in &per_column[i] {
        let v = &candidates[k];
        let fits = chosen
            .iter()
            .enumerate()
            .all(|(j, &kj)| close(&r1.bilinear(&candidates[kj], v), &r2[(j, i)]));
        if fits {
            chosen.push(k);
            if backtrack(r1, r2, candidates, per_column, chosen, close) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Looks for `c > 0` and `U` with `Uᵀ·(c·f1)·U = f2`.
///
/// The only candidate is `c = (det f2 / det f1)^{1/n}`. When that root is not
/// representable exactly, the test is repeated in floats with tolerance
/// `tol`.
pub fn is_homothetic<T: Scalar>(
    f1: &QuadraticForm<T>,
    f2: &QuadraticForm<T>,
    tol: f64,
) -> Result<Option<Homothety<T>>> {
    let n = f1.dim();
    if f2.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f2.dim(),
        });
    }
    if n == 0 {
        return Ok(Some(Homothety {
            scale: 1.0,
            exact_scale: Some(T::one()),
            witness: Matrix::identity(0),
        }));
    }
    let ratio = f2.det() / f1.det();
    if let Some(c) = ratio.nth_root(n as u32) {
        let scaled = f1.scaled(&c)?;
        return Ok(is_equivalent_tol(&scaled, f2, tol)?.map(|witness| Homothety {
            scale: c.to_f64(),
            exact_scale: Some(c),
            witness,
        }));
    }
    let c = ratio.to_f64().powf(1.0 / n as f64);
    let scaled = f1.to_f64().scaled(&c)?;
    Ok(is_equivalent_tol(&scaled, &f2.to_f64(), tol)?.map(|witness| Homothety {
        scale: c,
        exact_scale: None,
        witness,
    }))
}
