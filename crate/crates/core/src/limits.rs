//! Gromov–Hausdorff limits of paths and sequences of ppavs under the three
//! normalizations: diameter, volume, and injectivity radius.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::forms::{rescale_to_diameter_one, FlatTorus, LimitSpace, QuadraticForm};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::siegel::{in_siegel_set, metric_matrix, torus_model, u0, SiegelPoint};

/// Direction in which the path parameter degenerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    SToInfinity,
    TToZero,
}

/// `c·s^e`, stored in the `s → ∞` convention (`t = 1/s`).
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialEntry<T> {
    pub coefficient: T,
    pub exponent: T,
}

impl<T: Scalar> MonomialEntry<T> {
    pub fn new(coefficient: T, exponent: T, convention: Convention) -> Self {
        let exponent = match convention {
            Convention::SToInfinity => exponent,
            Convention::TToZero => -exponent,
        };
        if coefficient.is_zero() {
            return Self::zero();
        }
        MonomialEntry {
            coefficient,
            exponent,
        }
    }

    pub fn constant(c: T) -> Self {
        Self::new(c, T::zero(), Convention::SToInfinity)
    }

    pub fn zero() -> Self {
        MonomialEntry {
            coefficient: T::zero(),
            exponent: T::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    /// Growth order as `s → ∞`: exponent first, then coefficient. The zero
    /// entry is below everything.
    pub fn cmp_growth(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self
                .exponent
                .partial_cmp(&other.exponent)
                .unwrap_or(Ordering::Equal)
                .then_with(|| {
                    self.coefficient
                        .partial_cmp(&other.coefficient)
                        .unwrap_or(Ordering::Equal)
                }),
        }
    }

    /// Limit as `s → ∞`; `what` names the entry in the error.
    pub fn limit(&self, what: &str) -> Result<T> {
        if self.is_zero() || self.exponent < T::zero() {
            Ok(T::zero())
        } else if self.exponent.is_zero() {
            Ok(self.coefficient.clone())
        } else {
            Err(Error::NonConvergent {
                what: what.to_string(),
                exponent: self.exponent.to_string(),
            })
        }
    }

    pub fn evaluate(&self, s: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.coefficient.to_f64() * s.powf(self.exponent.to_f64())
        }
    }

    /// Substitutes `s ↦ s^k`.
    pub fn reparameterized(&self, k: &T) -> Self {
        MonomialEntry {
            coefficient: self.coefficient.clone(),
            exponent: self.exponent.clone() * k.clone(),
        }
    }
}

/// `Z(s) = X(s) + i·B(s)ᵀ·diag(d(s))·B(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSiegelPath<T> {
    pub x: Matrix<MonomialEntry<T>>,
    pub b: Matrix<MonomialEntry<T>>,
    pub d: Vec<MonomialEntry<T>>,
}

impl<T: Scalar> SymbolicSiegelPath<T> {
    /// Checks shapes, symmetry of `X`, unit upper triangularity of `B`, and
    /// positivity of the leading coefficients of `d`.
    pub fn new(
        x: Matrix<MonomialEntry<T>>,
        b: Matrix<MonomialEntry<T>>,
        d: Vec<MonomialEntry<T>>,
    ) -> Result<Self> {
        let g = d.len();
        for m in [&x, &b] {
            if m.rows() != g || m.cols() != g {
                return Err(Error::DimensionMismatch {
                    expected: g,
                    found: m.rows(),
                });
            }
        }
        for i in 0..g {
            for j in 0..g {
                if x[(i, j)] != x[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                let bij = &b[(i, j)];
                let ok = match i.cmp(&j) {
                    Ordering::Equal => *bij == MonomialEntry::constant(T::one()),
                    Ordering::Greater => bij.is_zero(),
                    Ordering::Less => true,
                };
                if !ok {
                    return Err(Error::InvalidParameter(format!(
                        "B must be unit upper triangular; entry ({i},{j}) is {}·s^{}",
                        bij.coefficient, bij.exponent
                    )));
                }
            }
            if d[i].coefficient <= T::zero() {
                return Err(Error::InvalidParameter(format!(
                    "d[{i}] must have a positive coefficient"
                )));
            }
        }
        Ok(SymbolicSiegelPath { x, b, d })
    }

    /// `X = 0`, `B = I`.
    pub fn diagonal(d: Vec<MonomialEntry<T>>) -> Self {
        let g = d.len();
        let b = Matrix::from_fn(g, g, |r, c| {
            if r == c {
                MonomialEntry::constant(T::one())
            } else {
                MonomialEntry::zero()
            }
        });
        SymbolicSiegelPath {
            x: Matrix::from_fn(g, g, |_, _| MonomialEntry::zero()),
            b,
            d,
        }
    }

    pub fn g(&self) -> usize {
        self.d.len()
    }

    /// The point at parameter `s`, in floats.
    pub fn sample(&self, s: f64) -> Result<SiegelPoint<f64>> {
        let x = self.x.map(|m| m.evaluate(s));
        let b = self.b.map(|m| m.evaluate(s));
        let d: Vec<f64> = self.d.iter().map(|m| m.evaluate(s)).collect();
        let y = b.congruence(&Matrix::diagonal(&d));
        SiegelPoint::new(x, QuadraticForm::new(y)?)
    }

    pub fn reparameterized(&self, k: &T) -> Self {
        SymbolicSiegelPath {
            x: self.x.map(|m| m.reparameterized(k)),
            b: self.b.map(|m| m.reparameterized(k)),
            d: self.d.iter().map(|m| m.reparameterized(k)).collect(),
        }
    }

    fn limits(&self) -> Result<(Matrix<T>, Matrix<T>)> {
        let g = self.g();
        let mut x = Matrix::zeros(g, g);
        let mut b = Matrix::zeros(g, g);
        for i in 0..g {
            for j in 0..g {
                x[(i, j)] = self.x[(i, j)].limit(&format!("X[{i}][{j}]"))?;
                b[(i, j)] = self.b[(i, j)].limit(&format!("B[{i}][{j}]"))?;
            }
        }
        Ok((x, b))
    }

    /// Eventual Siegel-set ordering of `d`: exponents nondecreasing, equal
    /// exponents with coefficients within the slack `u`, and `d₁` bounded
    /// below.
    fn check_ordering(&self, u: &T) -> Result<()> {
        let g = self.g();
        if g == 0 {
            return Ok(());
        }
        let d1 = &self.d[0];
        if d1.exponent < T::zero() || (d1.exponent.is_zero() && T::one() >= u.clone() * d1.coefficient.clone()) {
            return Err(Error::OrderingViolated {
                index: 0,
                detail: "1 < u·d₁ fails for large s".into(),
            });
        }
        for i in 0..g - 1 {
            let (a, b) = (&self.d[i], &self.d[i + 1]);
            let bad = a.exponent > b.exponent
                || (a.exponent == b.exponent && a.coefficient >= u.clone() * b.coefficient.clone());
            if bad {
                return Err(Error::OrderingViolated {
                    index: i,
                    detail: format!("d_{} < u·d_{} fails for large s", i + 1, i + 2),
                });
            }
        }
        Ok(())
    }
}

/// Whether the path degenerates at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseKind {
    /// `d_g → ∞`; the limit has dimension `g − r`.
    Collapsing,
    /// The path converges inside the Siegel space; the limit is the rescaled
    /// `2g`-dimensional torus of the limit point.
    NonDegenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseResult<T> {
    pub kind: CollapseKind,
    pub r: usize,
    pub limit: FlatTorus<T>,
    /// `a_{r+1}, …, a_g`, ending in 1; empty for non-degenerate paths.
    pub profile: Vec<T>,
}

/// Diameter-normalized limit of a monomial path.
///
/// `a_j = lim d_j/d_g`, `r = #{j : a_j = 0}`, and the limit Gram matrix is
/// `B₂₂ᵀ·diag(a_{r+1..g})·B₂₂` with `B₂₂` the lower-right block of `lim B`,
/// rescaled to diameter 1.
pub fn classify_collapse_symbolic<T: Scalar>(
    path: &SymbolicSiegelPath<T>,
    tol: f64,
) -> Result<CollapseResult<T>> {
    let g = path.g();
    if g == 0 {
        return Err(Error::InvalidParameter("genus must be positive".into()));
    }
    let (x_inf, b_inf) = path.limits()?;
    path.check_ordering(&T::from_i64(u0(g)))?;
    let dg = &path.d[g - 1];
    if dg.exponent <= T::zero() {
        let d: Vec<T> = path
            .d
            .iter()
            .enumerate()
            .map(|(i, m)| m.limit(&format!("d[{i}]")))
            .collect::<Result<_>>()?;
        let y = b_inf.congruence(&Matrix::diagonal(&d));
        let z = SiegelPoint::new(x_inf, QuadraticForm::new(y)?)?;
        return Ok(CollapseResult {
            kind: CollapseKind::NonDegenerate,
            r: 0,
            limit: rescale_to_diameter_one(&torus_model(&z), tol)?,
            profile: Vec::new(),
        });
    }
    let a: Vec<T> = path
        .d
        .iter()
        .map(|dj| {
            if dj.exponent < dg.exponent {
                T::zero()
            } else {
                dj.coefficient.clone() / dg.coefficient.clone()
            }
        })
        .collect();
    assemble(&a, &b_inf, tol)
}

fn assemble<T: Scalar>(a: &[T], b_inf: &Matrix<T>, tol: f64) -> Result<CollapseResult<T>> {
    let g = a.len();
    let r = a.iter().take_while(|v| v.is_zero()).count();
    if a[r..].iter().any(|v| v.is_zero()) {
        return Err(Error::OrderingViolated {
            index: r,
            detail: "vanishing ratios must form an initial segment".into(),
        });
    }
    let b22 = b_inf.submatrix(r, g, r, g);
    let p = b22.congruence(&Matrix::diagonal(&a[r..]));
    let limit = rescale_to_diameter_one(&FlatTorus::new(QuadraticForm::new(p)?), tol)?;
    Ok(CollapseResult {
        kind: CollapseKind::Collapsing,
        r,
        limit,
        profile: a[r..].to_vec(),
    })
}

/// Evidence behind a numeric classification.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceReport {
    /// `ratios[k][j] = d_j/d_g` at sample `k`.
    pub ratios: Vec<Vec<f64>>,
    /// `d_g` at each sample.
    pub top: Vec<f64>,
    /// Indices `j` judged to have `d_j/d_g → 0`.
    pub collapsed: Vec<usize>,
    /// Largest change over the last two samples among the ratios kept as
    /// positive limits.
    pub tail_spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericCollapse {
    pub result: CollapseResult<f64>,
    pub report: ConfidenceReport,
}

/// Minimum sample count accepted by [`classify_collapse_numeric`].
pub const MIN_SAMPLES: usize = 8;

/// Classifies a finite sequence by its tail.
///
/// A ratio `d_j/d_g` counts as vanishing when its last three values are below
/// `tol` and decreasing; otherwise its last two values must agree within
/// `tol` (relative). `d_g` must either increase by a factor above `1 + tol`
/// over each of the last three steps or stay constant within `tol`.
pub fn classify_collapse_numeric(samples: &[SiegelPoint<f64>], tol: f64) -> Result<NumericCollapse> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let g = samples[0].g();
    if g == 0 {
        return Err(Error::InvalidParameter("genus must be positive".into()));
    }
    let u = u0(g) as f64;
    let mut ratios = Vec::with_capacity(samples.len());
    let mut top = Vec::with_capacity(samples.len());
    for (k, z) in samples.iter().enumerate() {
        if z.g() != g {
            return Err(Error::DimensionMismatch {
                expected: g,
                found: z.g(),
            });
        }
        if !in_siegel_set(z, &u) {
            return Err(Error::InvalidParameter(format!(
                "sample {k} is not in the Siegel set with u = {u}"
            )));
        }
        let jd = z.y.jacobi();
        let dg = jd.d[g - 1];
        ratios.push(jd.d.iter().map(|dj| dj / dg).collect::<Vec<_>>());
        top.push(dg);
    }
    let n = samples.len();
    let tail = &top[n - 4..];
    let diverging = tail.windows(2).all(|w| w[1] > w[0] * (1.0 + tol));
    let constant = tail.windows(2).all(|w| (w[1] - w[0]).abs() <= tol * w[1].abs().max(1.0));
    let last = &samples[n - 1];

    if !diverging {
        if !constant {
            return Err(Error::NotClassified(format!(
                "d_g neither diverges nor settles over the last samples: {tail:?}"
            )));
        }
        let prev = &samples[n - 2];
        if !last.x.close_to(&prev.x, tol * last.x.max_abs().max(1.0))
            || !last.y.gram().close_to(prev.y.gram(), tol * last.y.gram().max_abs().max(1.0))
        {
            return Err(Error::NotClassified("the point does not settle".into()));
        }
        return Ok(NumericCollapse {
            result: CollapseResult {
                kind: CollapseKind::NonDegenerate,
                r: 0,
                limit: rescale_to_diameter_one(&torus_model(last), tol)?,
                profile: Vec::new(),
            },
            report: ConfidenceReport {
                ratios,
                top,
                collapsed: Vec::new(),
                tail_spread: 0.0,
            },
        });
    }

    let mut a = vec![0.0; g];
    let mut collapsed = Vec::new();
    let mut spread: f64 = 0.0;
    for j in 0..g {
        let series: Vec<f64> = ratios[n - 3..].iter().map(|r| r[j]).collect();
        let vanishing = j + 1 < g
            && series.iter().all(|&v| v < tol)
            && series.windows(2).all(|w| w[1] < w[0]);
        if vanishing {
            collapsed.push(j);
            continue;
        }
        let change = (series[2] - series[1]).abs();
        if change > tol * series[2].abs().max(1.0) {
            return Err(Error::NotClassified(format!(
                "ratio d_{}/d_g oscillates in the tail: {series:?}",
                j + 1
            )));
        }
        spread = spread.max(change);
        a[j] = series[2];
    }
    let jd_last = last.y.jacobi();
    let jd_prev = samples[n - 2].y.jacobi();
    if !jd_last.b.close_to(&jd_prev.b, tol * jd_last.b.max_abs().max(1.0)) {
        return Err(Error::NotClassified("Jacobi factor B does not settle".into()));
    }
    let result = assemble(&a, &jd_last.b, tol).map_err(|e| match e {
        Error::OrderingViolated { detail, .. } => Error::NotClassified(detail),
        other => other,
    })?;
    Ok(NumericCollapse {
        result,
        report: ConfidenceReport {
            ratios,
            top,
            collapsed,
            tail_spread: spread,
        },
    })
}

/// Pointed limit with volume fixed: the torus of the bounded block times a
/// Euclidean factor of rank `g − r`, where `r` counts the entries of `d` with
/// exponent 0.
pub fn fixed_volume_limit<T: Scalar>(path: &SymbolicSiegelPath<T>) -> Result<LimitSpace<T>> {
    let g = path.g();
    let (x_inf, b_inf) = path.limits()?;
    path.check_ordering(&T::from_i64(u0(g)))?;
    let r = path.d.iter().take_while(|m| m.exponent.is_zero()).count();
    if let Some((i, _)) = path.d.iter().enumerate().skip(r).find(|(_, m)| m.exponent <= T::zero()) {
        return Err(Error::OrderingViolated {
            index: i,
            detail: "bounded directions of d must come first".into(),
        });
    }
    let torus_part = if r == 0 {
        None
    } else {
        let d: Vec<T> = path.d[..r].iter().map(|m| m.coefficient.clone()).collect();
        let b11 = b_inf.submatrix(0, r, 0, r);
        let y = QuadraticForm::new(b11.congruence(&Matrix::diagonal(&d)))?;
        let z = SiegelPoint::new(x_inf.submatrix(0, r, 0, r), y)?;
        Some(FlatTorus::new(metric_matrix(&z)))
    };
    Ok(LimitSpace {
        circle_circumferences: Vec::new(),
        euclidean_rank: g - r,
        torus_part,
    })
}

/// Limit with injectivity radius fixed, for `X = 0`, `B = I`,
/// `Y = diag(a_j·L)`: circles of circumference `a_g/a_j` for `r < j ≤ g` and
/// a Euclidean factor of rank `g + r`.
pub fn fixed_injrad_limit<T: Scalar>(a: &[T], r: usize, u: &T) -> Result<LimitSpace<T>> {
    let g = a.len();
    if g == 0 || r >= g {
        return Err(Error::InvalidParameter(format!("need 0 ≤ r < g, got r = {r}, g = {g}")));
    }
    if let Some(i) = a.iter().position(|v| *v <= T::zero()) {
        return Err(Error::InvalidParameter(format!("a[{i}] must be positive")));
    }
    if T::one() >= u.clone() * a[0].clone() {
        return Err(Error::OrderingViolated {
            index: 0,
            detail: "1 < u·a₁ fails".into(),
        });
    }
    for i in 0..g - 1 {
        if a[i] >= u.clone() * a[i + 1].clone() {
            return Err(Error::OrderingViolated {
                index: i,
                detail: format!("a_{} < u·a_{} fails", i + 1, i + 2),
            });
        }
    }
    let ag = a[g - 1].clone();
    Ok(LimitSpace {
        circle_circumferences: a[r..].iter().map(|aj| ag.clone() / aj.clone()).collect(),
        euclidean_rank: g + r,
        torus_part: None,
    })
}

/// Limit of a product whose factors diverge at different rates: only the
/// fastest-growing factor survives the diameter rescaling.
pub fn product_collapse_reduce<T: Scalar>(blocks: &[(FlatTorus<T>, T)], tol: f64) -> Result<FlatTorus<T>> {
    let (best, rest) = blocks
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        .map(|(i, blk)| (blk, i))
        .ok_or_else(|| Error::InvalidParameter("no blocks".into()))?;
    if blocks
        .iter()
        .enumerate()
        .any(|(i, (_, e))| i != rest && *e == best.1)
    {
        return Err(Error::TiedDivergence(best.1.to_string()));
    }
    rescale_to_diameter_one(&best.0, tol)
}
