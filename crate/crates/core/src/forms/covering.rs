//! Covering radius of a lattice, i.e. the diameter of the flat torus.
//!
//! The form is first split into orthogonal blocks (after LLL if the plain
//! split leaves a block of size ≥ 3). Blocks of size one and two have closed
//! forms; larger blocks go through a branch-and-bound over the fundamental
//! domain that returns a certified interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::enumerate::Enumerator;
use super::{lll_reduce_matrix, QuadraticForm};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Default number of cell evaluations for the branch-and-bound.
pub const DEFAULT_BUDGET: usize = 400_000;

/// Squared covering radius: exact, or a certified enclosure.
#[derive(Debug, Clone, PartialEq)]
pub enum CoveringRadiusSq<T> {
    Exact(T),
    Bounded { lower: f64, upper: f64 },
}

impl<T: Scalar> CoveringRadiusSq<T> {
    /// Best float estimate of the squared radius.
    pub fn estimate(&self) -> f64 {
        match self {
            CoveringRadiusSq::Exact(v) => v.to_f64(),
            CoveringRadiusSq::Bounded { lower, upper } => (lower * upper).sqrt(),
        }
    }

    pub fn exact(&self) -> Option<&T> {
        match self {
            CoveringRadiusSq::Exact(v) => Some(v),
            CoveringRadiusSq::Bounded { .. } => None,
        }
    }
}

/// Enclosure of the covering radius itself (not squared).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringBounds {
    pub lower: f64,
    pub upper: f64,
}

impl CoveringBounds {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

pub fn covering_radius_sq<T: Scalar>(
    form: &QuadraticForm<T>,
    tol: f64,
    budget: usize,
) -> Result<CoveringRadiusSq<T>> {
    check_tol(tol)?;
    let blocks = orthogonal_blocks(form.gram());
    let largest = |bs: &[Vec<usize>]| bs.iter().map(Vec::len).max().unwrap_or(0);
    if largest(&blocks) > 2 {
        let delta = T::from_i64(3) / T::from_i64(4);
        let (reduced, _) = lll_reduce_matrix(form.gram(), &delta);
        let reblocked = orthogonal_blocks(&reduced);
        if largest(&reblocked) < largest(&blocks) {
            return combine(&reduced, &reblocked, tol, budget);
        }
    }
    combine(form.gram(), &blocks, tol, budget)
}

fn combine<T: Scalar>(
    gram: &Matrix<T>,
    blocks: &[Vec<usize>],
    tol: f64,
    budget: usize,
) -> Result<CoveringRadiusSq<T>> {
    let mut exact = T::zero();
    let mut lower = 0.0;
    let mut upper = 0.0;
    let mut all_exact = true;
    for idx in blocks {
        let sub = gram.principal(idx);
        match idx.len() {
            1 => exact = exact + sub[(0, 0)].clone() / T::from_i64(4),
            2 => exact = exact + two_dim(&sub),
            _ => {
                all_exact = false;
                let b = branch_and_bound(&sub.to_f64(), tol, budget)?;
                lower += b.lower * b.lower;
                upper += b.upper * b.upper;
            }
        }
    }
    if all_exact {
        Ok(CoveringRadiusSq::Exact(exact))
    } else {
        let e = exact.to_f64();
        Ok(CoveringRadiusSq::Bounded {
            lower: lower + e,
            upper: upper + e,
        })
    }
}

/// Covering radius as a float; exact up to the final square root whenever
/// every orthogonal block has size at most two.
pub fn covering_radius<T: Scalar>(form: &QuadraticForm<T>, tol: f64) -> Result<f64> {
    Ok(covering_radius_sq(form, tol, DEFAULT_BUDGET)?.estimate().sqrt())
}

/// Branch-and-bound enclosure regardless of dimension; used to cross-check
/// the closed forms.
pub fn covering_radius_sampled<T: Scalar>(
    form: &QuadraticForm<T>,
    tol: f64,
    budget: usize,
) -> Result<CoveringBounds> {
    check_tol(tol)?;
    if form.dim() == 0 {
        return Ok(CoveringBounds {
            lower: 0.0,
            upper: 0.0,
        });
    }
    branch_and_bound(&form.gram().to_f64(), tol, budget)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")))
    }
}

/// Connected components of the graph `i ~ j ⇔ G_ij ≠ 0`, each sorted.
fn orthogonal_blocks<T: Scalar>(g: &Matrix<T>) -> Vec<Vec<usize>> {
    let n = g.rows();
    let mut comp = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut stack = vec![s];
        let mut members = Vec::new();
        comp[s] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..n {
                if comp[j] == usize::MAX && !g[(i, j)].is_zero() {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    blocks
}

/// Circumradius of the Delaunay triangle of a Lagrange-reduced basis.
///
/// After reduction `0 ≤ 2b ≤ a ≤ c`, the triangle `0, v₁, v₂` is non-obtuse
/// and its circumcenter is a deepest hole.
fn two_dim<T: Scalar>(g: &Matrix<T>) -> T {
    let (mut a, mut b, mut c) = (g[(0, 0)].clone(), g[(0, 1)].clone(), g[(1, 1)].clone());
    let two = T::from_i64(2);
    loop {
        if a > c {
            std::mem::swap(&mut a, &mut c);
            continue;
        }
        if two.clone() * b.abs() > a {
            let q = T::from_i64((b.clone() / a.clone()).round_i64());
            c = c - two.clone() * q.clone() * b.clone() + q.clone() * q.clone() * a.clone();
            b = b - q * a.clone();
            continue;
        }
        break;
    }
    let b = b.abs();
    let num = a.clone() * c.clone() * (a.clone() + c.clone() - two * b.clone());
    let den = T::from_i64(4) * (a * c - b.clone() * b);
    num / den
}

struct Cell {
    upper: f64,
    order: usize,
    center: Vec<f64>,
    half: Vec<f64>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// Maximizes the distance-to-lattice function over a fundamental domain.
///
/// Distance to the lattice is 1-Lipschitz in the form's own norm, so a box
/// with center `c` and half-widths `h` cannot contain a point farther than
/// `dist(c) + max_s ‖s∘h‖` from the lattice. Boxes are split best-first
/// until the largest such bound is within `tol` (relative) of the best
/// center found.
fn branch_and_bound(g: &Matrix<f64>, tol: f64, budget: usize) -> Result<CoveringBounds> {
    let n = g.rows();
    let (reduced, _) = lll_reduce_matrix(g, &0.75);
    let en = Enumerator::new(&reduced);
    let sign_patterns = n <= 10;
    let radius = |h: &[f64]| -> f64 {
        if sign_patterns {
            let mut best: f64 = 0.0;
            // Patterns and their negatives give the same value; fix the sign of h₀.
            for mask in 0..(1usize << (n - 1)) {
                let v: Vec<f64> = (0..n)
                    .map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -h[i] } else { h[i] })
                    .collect();
                best = best.max(reduced.bilinear(&v, &v));
            }
            best.sqrt()
        } else {
            (0..n).map(|i| h[i] * reduced[(i, i)].sqrt()).sum()
        }
    };

    let mut order = 0;
    let mut lower: f64 = 0.0;
    let mut heap = BinaryHeap::new();
    // x ↦ −x maps the unit cube onto itself modulo ℤⁿ, so half of it suffices.
    let mut root_center = vec![0.5; n];
    root_center[0] = 0.25;
    let mut root_half = vec![0.5; n];
    root_half[0] = 0.25;
    let d = en.closest_distance_sq(&root_center).sqrt();
    lower = lower.max(d);
    heap.push(Cell {
        upper: d + radius(&root_half),
        order,
        center: root_center,
        half: root_half,
    });
    let mut evaluations = 1;
    loop {
        let top = heap.peek().expect("heap never empties");
        let upper = top.upper;
        if upper - lower <= tol * lower {
            return Ok(CoveringBounds { lower, upper });
        }
        if evaluations + 2 > budget {
            return Err(Error::ToleranceNotReached { lower, upper });
        }
        let cell = heap.pop().expect("peeked");
        let split = (0..n)
            .max_by(|&i, &j| {
                let wi = cell.half[i] * reduced[(i, i)].sqrt();
                let wj = cell.half[j] * reduced[(j, j)].sqrt();
                wi.total_cmp(&wj).then_with(|| j.cmp(&i))
            })
            .expect("n ≥ 1");
        let mut half = cell.half.clone();
        half[split] *= 0.5;
        let r = radius(&half);
        for sign in [-1.0, 1.0] {
            let mut center = cell.center.clone();
            center[split] += sign * half[split];
            let d = en.closest_distance_sq(&center).sqrt();
            evaluations += 1;
            lower = lower.max(d);
            order += 1;
            heap.push(Cell {
                upper: d + r,
                order,
                center,
                half: half.clone(),
            });
        }
        // Cells that can no longer beat the best center are dropped lazily:
        // they sink in the heap and never get split.
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    fn form(rows: &[&[i64]]) -> QuadraticForm<Rational> {
        QuadraticForm::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .unwrap()
    }

    fn exact(f: &QuadraticForm<Rational>) -> Rational {
        covering_radius_sq(f, 1e-6, DEFAULT_BUDGET)
            .unwrap()
            .exact()
            .cloned()
            .expect("exact path")
    }

    /// Grid search over the fundamental domain with enumeration-based
    /// distances; a lower bound converging to the covering radius.
    fn grid_oracle(g: &Matrix<f64>, steps: usize) -> f64 {
        let n = g.rows();
        let mut best: f64 = 0.0;
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<f64> = idx.iter().map(|&k| k as f64 / steps as f64).collect();
            best = best.max(crate::forms::closest_vector_distance_sq(g, &x));
            let mut i = 0;
            loop {
                if i == n {
                    return best.sqrt();
                }
                idx[i] += 1;
                if idx[i] <= steps {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(exact(&form(&[&[4]])), int(1));
        assert_eq!(exact(&QuadraticForm::identity(2)), rat(1, 2));
        assert_eq!(exact(&form(&[&[1, 0], &[0, 2]])), rat(3, 4));
        assert_eq!(exact(&form(&[&[2, 1], &[1, 2]])), rat(2, 3));
        assert_eq!(exact(&form(&[&[2, -1], &[-1, 2]])), rat(2, 3));
        // Unreduced input: [[1,1],[1,2]] is ℤ² in disguise.
        assert_eq!(exact(&form(&[&[1, 1], &[1, 2]])), rat(1, 2));
        assert_eq!(exact(&QuadraticForm::identity(3)), rat(3, 4));
    }

    #[test]
    fn two_dim_matches_grid() {
        for rows in [
            [[3i64, 1], [1, 5]],
            [[7, -3], [-3, 2]],
            [[1, 0], [0, 9]],
        ] {
            let f = form(&[&rows[0], &rows[1]]);
            let mu = exact(&f).to_f64().sqrt();
            let grid = grid_oracle(&f.gram().to_f64(), 200);
            assert!(grid <= mu + 1e-12);
            assert!(mu - grid < 2e-2, "{mu} vs {grid}");
        }
    }

    #[test]
    fn sampled_identity_three() {
        let b = covering_radius_sampled(&QuadraticForm::<Rational>::identity(3), 1e-4, DEFAULT_BUDGET)
            .unwrap();
        let truth = 3f64.sqrt() / 2.0;
        assert!(b.lower <= truth + 1e-12 && truth <= b.upper + 1e-12);
        assert!(b.upper - b.lower <= 1e-4 * b.lower + 1e-15);
    }

    #[test]
    fn sampled_agrees_with_closed_form() {
        let f = form(&[&[2, 1], &[1, 2]]);
        let b = covering_radius_sampled(&f, 1e-6, DEFAULT_BUDGET).unwrap();
        let truth = (2.0f64 / 3.0).sqrt();
        assert!(b.lower <= truth + 1e-12 && truth <= b.upper + 1e-12);
    }

    #[test]
    fn three_dim_block_is_bounded() {
        let f = form(&[&[2, 1, 1], &[1, 2, 1], &[1, 1, 2]]);
        match covering_radius_sq(&f, 1e-6, DEFAULT_BUDGET).unwrap() {
            CoveringRadiusSq::Bounded { lower, upper } => {
                // A₃ ≅ fcc lattice with min norm 2: covering radius² = 1.
                assert!(lower <= 1.0 + 1e-9 && 1.0 <= upper + 1e-9, "{lower} {upper}");
            }
            CoveringRadiusSq::Exact(v) => panic!("unexpected exact {v}"),
        }
    }

    #[test]
    fn budget_exhaustion_reports_bounds() {
        let f = QuadraticForm::<Rational>::identity(3);
        match covering_radius_sampled(&f, 1e-9, 50) {
            Err(Error::ToleranceNotReached { lower, upper }) => assert!(lower <= upper),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn scaling_law() {
        let f = form(&[&[3, 1], &[1, 5]]);
        let g = f.scaled(&int(9)).unwrap();
        assert_eq!(exact(&g), exact(&f) * int(9));
    }
}
