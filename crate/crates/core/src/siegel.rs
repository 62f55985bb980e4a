//! Points of the Siegel upper half space, Siegel sets, and the flat torus of a
//! principally polarized abelian variety.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::forms::{jacobi_decompose, lll_reduce_matrix, FlatTorus, QuadraticForm};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `Z = X + iY` with `X` symmetric and `Y` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint<T> {
    pub x: Matrix<T>,
    pub y: QuadraticForm<T>,
}

impl<T: Scalar> SiegelPoint<T> {
    pub fn new(x: Matrix<T>, y: QuadraticForm<T>) -> Result<Self> {
        if x.rows() != y.dim() || !x.is_square() {
            return Err(Error::DimensionMismatch {
                expected: y.dim(),
                found: x.rows(),
            });
        }
        let tol = if T::EXACT { 0.0 } else { 1e-12 * x.max_abs().max(1.0) };
        x.check_symmetric(tol)?;
        Ok(SiegelPoint { x, y })
    }

    /// `X = 0`.
    pub fn imaginary(y: QuadraticForm<T>) -> Self {
        let g = y.dim();
        SiegelPoint {
            x: Matrix::zeros(g, g),
            y,
        }
    }

    pub fn from_rows(x: Vec<Vec<T>>, y: Vec<Vec<T>>) -> Result<Self> {
        Self::new(Matrix::from_rows(x)?, QuadraticForm::from_rows(y)?)
    }

    pub fn g(&self) -> usize {
        self.y.dim()
    }

    pub fn to_f64(&self) -> SiegelPoint<f64> {
        SiegelPoint {
            x: self.x.to_f64(),
            y: self.y.to_f64(),
        }
    }

    fn complex(&self) -> Matrix<Complex<T>> {
        let g = self.g();
        Matrix::from_fn(g, g, |r, c| {
            Complex::new(self.x[(r, c)].clone(), self.y.gram()[(r, c)].clone())
        })
    }
}

/// `[[Y⁻¹, Y⁻¹X], [XY⁻¹, XY⁻¹X + Y]]`, the Gram matrix of the lattice
/// `ℤ^g + Zℤ^g` in the flat Kähler metric, in the basis given by the columns
/// of `(I X; 0 Y)`. Its determinant is 1.
pub fn metric_matrix<T: Scalar>(z: &SiegelPoint<T>) -> QuadraticForm<T> {
    let y = z.y.gram();
    let yinv = y.inverse().expect("positive definite");
    let yinv_x = yinv.mul(&z.x);
    let x_yinv = z.x.mul(&yinv);
    let lower = x_yinv.mul(&z.x).add(y);
    let m = Matrix::from_blocks(&yinv, &yinv_x, &x_yinv, &lower);
    if T::EXACT {
        QuadraticForm::from_trusted(m)
    } else {
        let n = m.rows();
        QuadraticForm::from_trusted(Matrix::from_fn(n, n, |r, c| {
            (m[(r, c)].clone() + m[(c, r)].clone()) * T::half()
        }))
    }
}

pub fn torus_model<T: Scalar>(z: &SiegelPoint<T>) -> FlatTorus<T> {
    FlatTorus::new(metric_matrix(z))
}

/// Default Siegel-set parameter: 2 for `g = 1`, `2^g` otherwise.
pub fn u0(g: usize) -> i64 {
    if g <= 1 {
        2
    } else {
        1i64 << g.min(62)
    }
}

/// Strict membership in the Siegel set with parameter `u`:
/// `|x_ij| < u`, `|1 − b_ij| < u`, `1 < u·d₁`, `d_i < u·d_{i+1}`, with
/// `Y = Bᵀ·diag(d)·B`.
pub fn in_siegel_set<T: Scalar>(z: &SiegelPoint<T>, u: &T) -> bool {
    let g = z.g();
    let jd = jacobi_decompose(z.y.gram()).expect("positive definite");
    for i in 0..g {
        for j in 0..g {
            if z.x[(i, j)].abs() >= *u {
                return false;
            }
            if (T::one() - jd.b[(i, j)].clone()).abs() >= *u {
                return false;
            }
        }
    }
    if g > 0 && T::one() >= u.clone() * jd.d[0].clone() {
        return false;
    }
    (0..g.saturating_sub(1)).all(|i| jd.d[i] < u.clone() * jd.d[i + 1].clone())
}

/// An element of `Sp(2g, ℤ)`, acting by `Z ↦ (AZ + B)(CZ + D)⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticElement {
    gamma: Matrix<i64>,
}

impl SymplecticElement {
    /// Checks `γᵀJγ = J` with `J = [[0, I], [−I, 0]]`.
    pub fn new(gamma: Matrix<i64>) -> Result<Self> {
        if !gamma.is_square() || gamma.rows() % 2 != 0 {
            return Err(Error::NotSymplectic);
        }
        let j = standard_j(gamma.rows() / 2);
        if gamma.congruence(&j) != j {
            return Err(Error::NotSymplectic);
        }
        Ok(SymplecticElement { gamma })
    }

    pub fn identity(g: usize) -> Self {
        SymplecticElement {
            gamma: Matrix::identity(2 * g),
        }
    }

    /// `[[Uᵀ, 0], [0, U⁻¹]]`, acting by `Z ↦ UᵀZU`.
    pub fn from_unimodular(u: &Matrix<i64>) -> Result<Self> {
        let g = u.rows();
        let inv = u.unimodular_inverse()?;
        let zero = Matrix::zeros(g, g);
        Self::new(Matrix::from_blocks(&u.transpose(), &zero, &zero, &inv))
    }

    /// `[[I, S], [0, I]]` for symmetric integral `S`, acting by `Z ↦ Z + S`.
    pub fn translation(s: &Matrix<i64>) -> Result<Self> {
        let g = s.rows();
        Self::new(Matrix::from_blocks(
            &Matrix::identity(g),
            s,
            &Matrix::zeros(g, g),
            &Matrix::identity(g),
        ))
    }

    /// Inversion in the first coordinate: `A = D = I − E₁₁`, `B = −E₁₁`,
    /// `C = E₁₁`. For `g = 1` this is `Z ↦ −1/Z`.
    pub fn partial_inversion(g: usize) -> Self {
        let mut a = Matrix::<i64>::identity(g);
        a[(0, 0)] = 0;
        let mut b = Matrix::<i64>::zeros(g, g);
        b[(0, 0)] = -1;
        let mut c = Matrix::<i64>::zeros(g, g);
        c[(0, 0)] = 1;
        SymplecticElement {
            gamma: Matrix::from_blocks(&a, &b, &c, &a),
        }
    }

    pub fn matrix(&self) -> &Matrix<i64> {
        &self.gamma
    }

    pub fn g(&self) -> usize {
        self.gamma.rows() / 2
    }

    /// `self · other`, so that acting by the product means acting by `other`
    /// first.
    pub fn compose(&self, other: &Self) -> Self {
        SymplecticElement {
            gamma: self.gamma.mul(&other.gamma),
        }
    }

    fn blocks(&self) -> [Matrix<i64>; 4] {
        let g = self.g();
        let m = &self.gamma;
        [
            m.submatrix(0, g, 0, g),
            m.submatrix(0, g, g, 2 * g),
            m.submatrix(g, 2 * g, 0, g),
            m.submatrix(g, 2 * g, g, 2 * g),
        ]
    }

    /// `(AZ + B)(CZ + D)⁻¹`, computed in the point's own arithmetic.
    pub fn act<T: Scalar>(&self, z: &SiegelPoint<T>) -> Result<SiegelPoint<T>> {
        let g = z.g();
        if self.g() != g {
            return Err(Error::DimensionMismatch {
                expected: g,
                found: self.g(),
            });
        }
        let [a, b, c, d] = self.blocks().map(|m| m.map(|&v| Complex::new(T::from_i64(v), T::zero())));
        let zc = z.complex();
        let num = a.mul(&zc).add(&b);
        let den = c.mul(&zc).add(&d);
        let w = num.mul(&complex_inverse(&den)?);
        let sym = |f: &dyn Fn(&Complex<T>) -> T| {
            Matrix::from_fn(g, g, |r, col| {
                if T::EXACT {
                    f(&w[(r, col)])
                } else {
                    (f(&w[(r, col)]) + f(&w[(col, r)])) * T::half()
                }
            })
        };
        let x = sym(&|c: &Complex<T>| c.re.clone());
        let y = sym(&|c: &Complex<T>| c.im.clone());
        SiegelPoint::new(x, QuadraticForm::new(y)?)
    }
}

fn standard_j(g: usize) -> Matrix<i64> {
    let id = Matrix::<i64>::identity(g);
    let zero = Matrix::zeros(g, g);
    Matrix::from_blocks(&zero, &id, &id.scale(&-1), &zero)
}

fn complex_inverse<T: Scalar>(m: &Matrix<Complex<T>>) -> Result<Matrix<Complex<T>>> {
    let n = m.rows();
    let mut a = m.clone();
    let mut inv: Matrix<Complex<T>> = Matrix::identity(n);
    for k in 0..n {
        let mut pivot: Option<(usize, T)> = None;
        for r in k..n {
            let size = a[(r, k)].norm_sqr();
            if size.is_zero() {
                continue;
            }
            if T::EXACT {
                pivot = Some((r, size));
                break;
            }
            if pivot.as_ref().is_none_or(|(_, s)| size > *s) {
                pivot = Some((r, size));
            }
        }
        let (p, _) = pivot.ok_or(Error::Singular)?;
        a.swap_rows(p, k);
        inv.swap_rows(p, k);
        let pv = a[(k, k)].clone();
        for c in 0..n {
            a[(k, c)] = a[(k, c)].clone() / pv.clone();
            inv[(k, c)] = inv[(k, c)].clone() / pv.clone();
        }
        for r in 0..n {
            if r == k || a[(r, k)].is_zero() {
                continue;
            }
            let f = a[(r, k)].clone();
            for c in 0..n {
                let v = a[(r, c)].clone() - f.clone() * a[(k, c)].clone();
                a[(r, c)] = v;
                let w = inv[(r, c)].clone() - f.clone() * inv[(k, c)].clone();
                inv[(r, c)] = w;
            }
        }
    }
    Ok(inv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiegelReduction<T> {
    pub point: SiegelPoint<T>,
    /// `point = gamma · input`.
    pub gamma: SymplecticElement,
    pub success: bool,
}

/// Default iteration cap for [`siegel_reduce`].
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Alternates LLL reduction of `Y`, integral translation of `X` into
/// `[−1/2, 1/2]`, and the first-coordinate inversion while `|z₁₁| < 1`.
///
/// Stops as soon as the point is in the Siegel set with parameter `u`, when a
/// round changes nothing, or at `max_iterations`; `success` reports Siegel-set
/// membership of the returned point.
pub fn siegel_reduce<T: Scalar>(
    z: &SiegelPoint<T>,
    u: &T,
    max_iterations: usize,
) -> Result<SiegelReduction<T>> {
    let g = z.g();
    if *u <= T::one() {
        return Err(Error::InvalidParameter(format!("Siegel parameter must exceed 1, got {u}")));
    }
    if *u < T::from_i64(u0(g)) {
        log::warn!("Siegel parameter {u} is below the default u0({g}) = {}", u0(g));
    }
    let mut point = z.clone();
    let mut gamma = SymplecticElement::identity(g);
    for _ in 0..max_iterations {
        if in_siegel_set(&point, u) {
            return Ok(SiegelReduction {
                point,
                gamma,
                success: true,
            });
        }
        let delta = T::from_i64(3) / T::from_i64(4);
        let (_, lll) = lll_reduce_matrix(point.y.gram(), &delta);
        let mut changed = false;
        if lll != Matrix::identity(g) {
            let step = SymplecticElement::from_unimodular(&lll)?;
            point = step.act(&point)?;
            gamma = step.compose(&gamma);
            changed = true;
        }
        let shift = Matrix::from_fn(g, g, |r, c| -point.x[(r, c)].round_i64());
        if !shift.is_zero_matrix() {
            let step = SymplecticElement::translation(&shift)?;
            point = step.act(&point)?;
            gamma = step.compose(&gamma);
            changed = true;
        }
        let z11 = point.x[(0, 0)].clone() * point.x[(0, 0)].clone()
            + point.y.gram()[(0, 0)].clone() * point.y.gram()[(0, 0)].clone();
        if z11 < T::one() {
            let step = SymplecticElement::partial_inversion(g);
            point = step.act(&point)?;
            gamma = step.compose(&gamma);
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let success = in_siegel_set(&point, u);
    Ok(SiegelReduction {
        point,
        gamma,
        success,
    })
}
