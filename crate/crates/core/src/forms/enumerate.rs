//! Fincke–Pohst enumeration of lattice points in ellipsoids.
//!
//! Enumeration runs in floats on the Jacobi factors of an LLL-reduced Gram
//! matrix with a small relative slack; candidates are then re-evaluated in the
//! caller's arithmetic, so exact mode never accepts or loses a vector because
//! of round-off.

use std::cmp::Reverse;

use super::{jacobi_decompose, lll_reduce_matrix, QuadraticForm};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

const SLACK_REL: f64 = 1e-9;
const SLACK_ABS: f64 = 1e-12;

/// Float Jacobi factors used to drive the enumeration.
pub(crate) struct Enumerator {
    b: Matrix<f64>,
    d: Vec<f64>,
}

impl Enumerator {
    pub(crate) fn new(gram: &Matrix<f64>) -> Self {
        let jd = jacobi_decompose(gram).expect("positive-definite Gram matrix");
        Enumerator { b: jd.b, d: jd.d }
    }

    fn dim(&self) -> usize {
        self.d.len()
    }

    /// Calls `visit` on every integer `x` with `Q(x − c) ≤ bound`.
    pub(crate) fn for_each_in_ellipsoid(
        &self,
        center: &[f64],
        bound: f64,
        visit: &mut dyn FnMut(&[i64], f64),
    ) {
        let n = self.dim();
        let mut x = vec![0i64; n];
        if n == 0 {
            visit(&x, 0.0);
            return;
        }
        self.descend(n - 1, center, bound, 0.0, &mut x, visit);
    }

    fn offset(&self, i: usize, center: &[f64], x: &[i64]) -> f64 {
        ((i + 1)..self.dim())
            .map(|j| self.b[(i, j)] * (x[j] as f64 - center[j]))
            .sum()
    }

    fn descend(
        &self,
        i: usize,
        center: &[f64],
        bound: f64,
        partial: f64,
        x: &mut Vec<i64>,
        visit: &mut dyn FnMut(&[i64], f64),
    ) {
        let c = center[i] - self.offset(i, center, x);
        let room = (bound - partial).max(0.0);
        let r = (room / self.d[i]).sqrt();
        let lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        for xi in lo..=hi {
            let t = xi as f64 - c;
            let level = partial + self.d[i] * t * t;
            if level > bound {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                visit(x, level);
            } else {
                self.descend(i - 1, center, bound, level, x, visit);
            }
        }
        x[i] = 0;
    }

    /// Squared distance from `target` to the nearest lattice point.
    pub(crate) fn closest_distance_sq(&self, target: &[f64]) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        // Babai nearest plane for an initial radius.
        let mut x = vec![0i64; n];
        let mut babai = 0.0;
        for i in (0..n).rev() {
            let c = target[i] - self.offset(i, target, &x);
            x[i] = c.round() as i64;
            let t = x[i] as f64 - c;
            babai += self.d[i] * t * t;
        }
        let mut best = babai;
        let mut x = vec![0i64; n];
        self.descend_min(n - 1, target, 0.0, &mut x, &mut best);
        best
    }

    fn descend_min(&self, i: usize, center: &[f64], partial: f64, x: &mut Vec<i64>, best: &mut f64) {
        let c = center[i] - self.offset(i, center, x);
        let room = (*best - partial).max(0.0);
        let r = (room / self.d[i]).sqrt();
        let lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        for xi in lo..=hi {
            let t = xi as f64 - c;
            let level = partial + self.d[i] * t * t;
            if level > *best {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                *best = level;
            } else {
                self.descend_min(i - 1, center, level, x, best);
            }
        }
        x[i] = 0;
    }
}

/// All nonzero `v ∈ ℤⁿ` with `vᵀFv ≤ bound`, both signs, sorted by length.
pub fn short_vectors<T: Scalar>(form: &QuadraticForm<T>, bound: &T) -> Vec<(Vec<i64>, T)> {
    let n = form.dim();
    if n == 0 || *bound <= T::zero() {
        return Vec::new();
    }
    let delta = T::from_i64(99) / T::from_i64(100);
    let (reduced, u) = lll_reduce_matrix(form.gram(), &delta);
    let en = Enumerator::new(&reduced.to_f64());
    let fb = bound.to_f64();
    let slack = fb * (1.0 + SLACK_REL) + SLACK_ABS;
    let zero = vec![0.0; n];
    let mut out = Vec::new();
    en.for_each_in_ellipsoid(&zero, slack, &mut |w, _| {
        if w.iter().all(|&c| c == 0) {
            return;
        }
        let v = u.mul_vec(w);
        let norm = form.evaluate(&v);
        let keep = if T::EXACT {
            norm <= *bound
        } else {
            norm.to_f64() <= slack
        };
        if keep {
            out.push((v, norm));
        }
    });
    sort_vectors(&mut out);
    out
}

fn sort_vectors<T: Scalar>(vs: &mut [(Vec<i64>, T)]) {
    vs.sort_by(|(a, na), (b, nb)| {
        na.partial_cmp(nb)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| l1(a).cmp(&l1(b)))
            .then_with(|| Reverse(a).cmp(&Reverse(b)))
    });
}

fn l1(v: &[i64]) -> i64 {
    v.iter().map(|x| x.abs()).sum()
}

/// A nonzero vector of minimal length and its squared length.
///
/// Among ties the vector with fewest/smallest entries is returned, with its
/// first nonzero entry positive.
pub fn shortest_vector<T: Scalar>(form: &QuadraticForm<T>) -> (Vec<i64>, T) {
    let n = form.dim();
    assert!(n > 0, "shortest vector of a zero-dimensional lattice");
    let delta = T::from_i64(99) / T::from_i64(100);
    let (reduced, _) = lll_reduce_matrix(form.gram(), &delta);
    let bound = (0..n)
        .map(|i| reduced[(i, i)].clone())
        .reduce(|a, b| if b < a { b } else { a })
        .expect("n > 0");
    let mut all = short_vectors(form, &bound);
    let min = all[0].1.clone();
    all.retain(|(v, norm)| {
        let positive = v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0);
        positive && norm.close_to(&min, SLACK_REL * min.to_f64().abs())
    });
    all.swap_remove(0)
}

/// Squared distance from a real point to the lattice `(ℤⁿ, gram)`.
pub fn closest_vector_distance_sq(gram: &Matrix<f64>, target: &[f64]) -> f64 {
    let (reduced, u) = lll_reduce_matrix(gram, &0.99);
    // Coordinates of the target in the reduced basis: u⁻¹·target.
    let uinv = u
        .unimodular_inverse()
        .expect("LLL transform is unimodular")
        .cast::<f64>();
    let t = uinv.mul_vec(target);
    Enumerator::new(&reduced).closest_distance_sq(&t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    fn form(rows: &[&[i64]]) -> QuadraticForm<Rational> {
        QuadraticForm::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    fn brute_force_min(f: &QuadraticForm<Rational>, range: i64) -> Rational {
        let n = f.dim();
        let mut best: Option<Rational> = None;
        let mut v = vec![-range; n];
        loop {
            if v.iter().any(|&c| c != 0) {
                let q = f.evaluate(&v);
                if best.as_ref().is_none_or(|b| q < *b) {
                    best = Some(q);
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return best.unwrap();
                }
                v[i] += 1;
                if v[i] <= range {
                    break;
                }
                v[i] = -range;
                i += 1;
            }
        }
    }

    #[test]
    fn spec_examples() {
        let (v, q) = shortest_vector(&form(&[&[1, 0], &[0, 2]]));
        assert_eq!((v, q), (vec![1, 0], int(1)));
        let f = form(&[&[2, 1], &[1, 2]]);
        let (v, q) = shortest_vector(&f);
        assert_eq!(q, int(2));
        assert_eq!(q, brute_force_min(&f, 2));
        assert!(v == vec![1, 0] || v == vec![0, 1]);
        let (_, q) = shortest_vector(&QuadraticForm::<Rational>::identity(3));
        assert_eq!(q, int(1));
    }

    #[test]
    fn skewed_form_matches_brute_force() {
        let f = form(&[&[10, 7, 3], &[7, 5, 2], &[3, 2, 3]]);
        let (v, q) = shortest_vector(&f);
        assert_eq!(f.evaluate(&v), q);
        assert_eq!(q, brute_force_min(&f, 4));
    }

    #[test]
    fn short_vector_counts() {
        // The hexagonal lattice has six minimal vectors.
        let hex = form(&[&[2, 1], &[1, 2]]);
        assert_eq!(short_vectors(&hex, &int(2)).len(), 6);
        assert_eq!(short_vectors(&QuadraticForm::<Rational>::identity(3), &int(2)).len(), 18);
    }

    #[test]
    fn closest_vector_on_square_lattice() {
        let g = Matrix::<f64>::identity(2);
        let d = closest_vector_distance_sq(&g, &[0.5, 0.5]);
        assert!((d - 0.5).abs() < 1e-12);
        let d = closest_vector_distance_sq(&g, &[3.1, -2.2]);
        assert!((d - 0.05).abs() < 1e-12);
    }
}
