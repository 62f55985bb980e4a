use super::{jacobi_decompose, QuadraticForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LllResult<T> {
    pub reduced: QuadraticForm<T>,
    /// Unimodular with `uᵀ·F·u = reduced`.
    pub u: Matrix<i64>,
}

/// LLL reduction of a Gram matrix with parameter `delta ∈ (1/4, 1)`.
pub fn lll_reduce<T: Scalar>(form: &QuadraticForm<T>, delta: &T) -> Result<LllResult<T>> {
    let quarter = T::one() / T::from_i64(4);
    if *delta <= quarter || *delta >= T::one() {
        return Err(Error::InvalidParameter(format!(
            "LLL parameter must lie in (1/4, 1), got {delta}"
        )));
    }
    let (gram, u) = lll_reduce_matrix(form.gram(), delta);
    Ok(LllResult {
        reduced: QuadraticForm::from_trusted(gram),
        u,
    })
}

/// Same as [`lll_reduce`] on a raw positive-definite Gram matrix.
pub fn lll_reduce_matrix<T: Scalar>(gram: &Matrix<T>, delta: &T) -> (Matrix<T>, Matrix<i64>) {
    let n = gram.rows();
    let mut g = gram.clone();
    let mut u = Matrix::<i64>::identity(n);
    if n < 2 {
        return (g, u);
    }
    let half = T::half();
    // Exact arithmetic terminates on its own; the cap only guards float
    // round-off ping-pong.
    let cap = 1000 * n * n + 10_000;
    let mut steps = 0;
    let mut k = 1;
    while k < n && steps < cap {
        steps += 1;
        let mut jd = jacobi_decompose(&g).expect("positive-definite Gram matrix");
        for j in (0..k).rev() {
            let mu = jd.b[(j, k)].clone();
            if mu.abs() <= half {
                continue;
            }
            let q = mu.round_i64();
            let qt = T::from_i64(q);
            subtract_column(&mut g, &mut u, k, j, q);
            for i in 0..j {
                let v = jd.b[(i, k)].clone() - qt.clone() * jd.b[(i, j)].clone();
                jd.b[(i, k)] = v;
            }
            jd.b[(j, k)] = mu - qt;
        }
        let mu = jd.b[(k - 1, k)].clone();
        let lhs = jd.d[k].clone();
        let rhs = (delta.clone() - mu.clone() * mu) * jd.d[k - 1].clone();
        if lhs >= rhs {
            k += 1;
        } else {
            g.swap_rows(k, k - 1);
            g.swap_cols(k, k - 1);
            u.swap_cols(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    if steps >= cap {
        log::warn!("LLL stopped at the iteration cap ({cap}) before full reduction");
    }
    (g, u)
}

/// Basis vector `k` becomes `b_k − q·b_j`.
fn subtract_column<T: Scalar>(g: &mut Matrix<T>, u: &mut Matrix<i64>, k: usize, j: usize, q: i64) {
    let n = g.rows();
    let qt = T::from_i64(q);
    for i in 0..n {
        let v = g[(i, k)].clone() - qt.clone() * g[(i, j)].clone();
        g[(i, k)] = v;
    }
    for i in 0..n {
        let v = g[(k, i)].clone() - qt.clone() * g[(j, i)].clone();
        g[(k, i)] = v;
    }
    for i in 0..n {
        u[(i, k)] -= q * u[(i, j)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};
    use num_traits::Signed;

    fn form(rows: &[&[i64]]) -> QuadraticForm<Rational> {
        QuadraticForm::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    fn is_lll_reduced(g: &Matrix<Rational>, delta: &Rational) -> bool {
        let jd = jacobi_decompose(g).unwrap();
        let n = g.rows();
        for k in 1..n {
            for j in 0..k {
                if jd.b[(j, k)].abs() > rat(1, 2) {
                    return false;
                }
            }
            let mu = jd.b[(k - 1, k)].clone();
            if jd.d[k] < (delta - &mu * &mu) * &jd.d[k - 1] {
                return false;
            }
        }
        true
    }

    #[test]
    fn identity_is_fixed() {
        let f = QuadraticForm::<Rational>::identity(2);
        let r = lll_reduce(&f, &rat(3, 4)).unwrap();
        assert_eq!(r.reduced, f);
        assert_eq!(r.u, Matrix::identity(2));
    }

    #[test]
    fn reduces_to_identity() {
        let f = form(&[&[1, 1], &[1, 2]]);
        let r = lll_reduce(&f, &rat(3, 4)).unwrap();
        assert_eq!(r.reduced.gram(), &Matrix::identity(2));
        assert_eq!(r.u.cast::<Rational>().congruence(f.gram()), *r.reduced.gram());
        assert_eq!(r.u.det_exact().abs(), int(1));
    }

    #[test]
    fn sorts_diagonal() {
        let f = form(&[&[4, 0], &[0, 1]]);
        let r = lll_reduce(&f, &rat(3, 4)).unwrap();
        assert_eq!(r.reduced, form(&[&[1, 0], &[0, 4]]));
    }

    #[test]
    fn skewed_three_dim() {
        let f = form(&[&[10, 7, 3], &[7, 5, 2], &[3, 2, 3]]);
        let delta = rat(99, 100);
        let r = lll_reduce(&f, &delta).unwrap();
        assert!(is_lll_reduced(r.reduced.gram(), &delta));
        assert_eq!(r.reduced.det(), f.det());
        assert_eq!(r.u.cast::<Rational>().congruence(f.gram()), *r.reduced.gram());
    }

    #[test]
    fn rejects_bad_delta() {
        let f = QuadraticForm::<Rational>::identity(2);
        assert!(lll_reduce(&f, &rat(1, 4)).is_err());
        assert!(lll_reduce(&f, &int(1)).is_err());
    }
}
