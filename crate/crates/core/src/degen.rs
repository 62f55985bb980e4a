//! One-parameter degenerations: ppav families given by valuation matrices,
//! curve families given by dual graphs with node multiplicities, collar
//! lengths, and the comparison of the two limits through the Torelli map.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{is_homothetic, rescale_to_diameter_one, FlatTorus, QuadraticForm};
use crate::hybrid::GluingFunction;
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::tropical::WeightedMetricGraph;

/// A maximally degenerating torus part with valuation matrix `M`
/// (`M[i][j] = ord_t p_ij`), optionally times a constant abelian factor.
#[derive(Debug, Clone, PartialEq)]
pub struct AVFamily<T> {
    valuation: QuadraticForm<T>,
    abelian: Option<QuadraticForm<T>>,
}

impl<T: Scalar> AVFamily<T> {
    /// `extension` is the class of the Raynaud extension, an
    /// `(g − r) × r` matrix; only the zero class is accepted.
    pub fn new(
        valuation: Matrix<T>,
        abelian: Option<Matrix<T>>,
        extension: Option<Matrix<T>>,
    ) -> Result<Self> {
        let valuation = QuadraticForm::new(valuation)?;
        let abelian = abelian.map(QuadraticForm::new).transpose()?;
        if let Some(e) = extension {
            let g_minus_r = abelian.as_ref().map_or(0, QuadraticForm::dim);
            if e.rows() != g_minus_r || e.cols() != valuation.dim() {
                return Err(Error::DimensionMismatch {
                    expected: g_minus_r,
                    found: e.rows(),
                });
            }
            if !e.is_zero_matrix() {
                return Err(Error::NontrivialRaynaud);
            }
        }
        Ok(AVFamily { valuation, abelian })
    }

    pub fn torus_rank(&self) -> usize {
        self.valuation.dim()
    }

    pub fn abelian_rank(&self) -> usize {
        self.abelian.as_ref().map_or(0, QuadraticForm::dim)
    }

    pub fn valuation(&self) -> &QuadraticForm<T> {
        &self.valuation
    }
}

/// The diameter-one torus with Gram matrix proportional to `M`. The abelian
/// factor has bounded diameter and disappears after rescaling.
pub fn av_family_limit<T: Scalar>(fam: &AVFamily<T>, tol: f64) -> Result<FlatTorus<T>> {
    rescale_to_diameter_one(&FlatTorus::new(fam.valuation.clone()), tol)
}

/// Rescaled tori built from the monomial periods `p_ij(t) = t^{−M_ij}`:
/// `Y(t)_ij = log|p_ij(t)|/2π = M_ij·(−log t)/2π`.
pub fn av_family_numeric_oracle<T: Scalar>(
    fam: &AVFamily<T>,
    t_samples: &[f64],
    tol: f64,
) -> Result<Vec<FlatTorus<f64>>> {
    let m = fam.valuation.gram().to_f64();
    t_samples
        .iter()
        .map(|&t| {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidParameter(format!("sample t = {t} is outside (0, 1)")));
            }
            let log_t = t.ln();
            let y = m.map(|mij| {
                let log_p = -mij * log_t;
                log_p / (2.0 * PI)
            });
            rescale_to_diameter_one(&FlatTorus::new(QuadraticForm::new(y)?), tol)
        })
        .collect()
}

/// Central dual graph of a family of curves with local equations
/// `zw = t^{m_e}` at the nodes. Input edge lengths are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily<T> {
    graph: WeightedMetricGraph<T>,
    multiplicities: Vec<u64>,
}

impl<T: Scalar> CurveFamily<T> {
    pub fn new(graph: WeightedMetricGraph<T>, multiplicities: Vec<u64>) -> Result<Self> {
        if multiplicities.len() != graph.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: graph.edges().len(),
                found: multiplicities.len(),
            });
        }
        if let Some(k) = multiplicities.iter().position(|&m| m == 0) {
            return Err(Error::InvalidParameter(format!("node {k} has multiplicity 0")));
        }
        let genus = graph.first_betti() as u64 + graph.total_weight();
        if !graph.is_stable_type(genus) {
            return Err(Error::InvalidGraph(format!(
                "not a stable dual graph of genus {genus}: some weight-0 vertex has valence below 3"
            )));
        }
        Ok(CurveFamily { graph, multiplicities })
    }

    pub fn graph(&self) -> &WeightedMetricGraph<T> {
        &self.graph
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn genus(&self) -> u64 {
        self.graph.first_betti() as u64 + self.graph.total_weight()
    }

    /// The central graph with edge `e` of length `m_e`.
    pub fn weighted_graph(&self) -> Result<WeightedMetricGraph<T>> {
        let lengths: Vec<T> = self.multiplicities.iter().map(|&m| T::from_i64(m as i64)).collect();
        self.graph.with_lengths(&lengths)
    }
}

/// Every edge gets the same length; the result has diameter one. The
/// multiplicities play no role.
pub fn curve_family_gh_limit<T: Scalar>(fam: &CurveFamily<T>) -> Result<WeightedMetricGraph<T>> {
    if fam.graph.edges().is_empty() {
        return Err(Error::NoCollapse);
    }
    let ones = vec![T::one(); fam.graph.edges().len()];
    fam.graph.with_lengths(&ones)?.rescale_to_diameter_one()
}

/// Edge lengths projectivized to sum one: `m_e/Σm` for `Log`, uniform for
/// `LogLog`.
pub fn curve_family_hybrid_limit<T: Scalar>(
    fam: &CurveFamily<T>,
    gluing: GluingFunction,
) -> Result<WeightedMetricGraph<T>> {
    let n = fam.graph.edges().len();
    if n == 0 {
        return Err(Error::NoCollapse);
    }
    let lengths: Vec<T> = match gluing {
        GluingFunction::Log => {
            let total = T::from_i64(fam.multiplicities.iter().sum::<u64>() as i64);
            fam.multiplicities
                .iter()
                .map(|&m| T::from_i64(m as i64) / total.clone())
                .collect()
        }
        GluingFunction::LogLog => vec![T::one() / T::from_i64(n as i64); n],
    };
    fam.graph.with_lengths(&lengths)
}

/// Length of the hyperbolic collar `{|t|/c* ≤ |z| ≤ c*}` around a node
/// `zw = t`, namely `π ∫_a^{1−a} csc(πx) dx` with `a = log c*/log|t|`
/// after the substitution `x = log|z|/log|t|`.
pub fn collar_length(t: Complex64, c_star: f64) -> Result<f64> {
    let abs_t = t.norm();
    if !(c_star > 0.0 && c_star < 1.0) {
        return Err(Error::InvalidParameter(format!("c* = {c_star} is outside (0, 1)")));
    }
    if !(abs_t > 0.0 && abs_t < c_star.powi(4)) {
        return Err(Error::InvalidParameter(format!(
            "|t| = {abs_t} must satisfy 0 < |t| < c*^4 = {}",
            c_star.powi(4)
        )));
    }
    let a = c_star.ln() / abs_t.ln();
    let integral = adaptive_gauss_kronrod(|x| 1.0 / (PI * x).sin(), a, 1.0 - a, 1e-6, 10_000)?;
    Ok(PI * integral)
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], 0`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate and its distance to the embedded Gauss rule.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive G7–K15: bisect the interval with the largest error until
/// the summed error is below `rel_tol·|integral|`.
fn adaptive_gauss_kronrod(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    let (v, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature("integrand is not finite on the interval".into()));
        }
        if error <= rel_tol * total.abs() {
            return Ok(total);
        }
        if parts.len() >= max_intervals {
            return Err(Error::Quadrature(format!(
                "error {error:.3e} after {max_intervals} subintervals"
            )));
        }
        let worst = (0..parts.len())
            .max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3))
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(Error::Quadrature("interval cannot be bisected further".into()));
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Both sides of the Torelli comparison for a curve family.
#[derive(Debug, Clone, PartialEq)]
pub struct TorelliComparison<T> {
    /// Tropical Torelli image of the GH limit of the curves.
    pub gh_side: FlatTorus<T>,
    /// GH limit of the Jacobians, whose valuation matrix is the cycle form of
    /// the graph with edge lengths `m_e`.
    pub av_side: FlatTorus<T>,
    pub continuous: bool,
}

pub fn torelli_family_compare<T: Scalar>(fam: &CurveFamily<T>, tol: f64) -> Result<TorelliComparison<T>> {
    if fam.graph.first_betti() == 0 {
        return Err(Error::TreeGraph);
    }
    let gh_side = curve_family_gh_limit(fam)?.torelli(tol)?;
    let jac = fam.weighted_graph()?.tropical_jacobian()?;
    let av_side = av_family_limit(&AVFamily::new(jac.gram.into_gram(), None, None)?, tol)?;
    let continuous = is_homothetic(&gh_side.gram, &av_side.gram, tol)?.is_some();
    Ok(TorelliComparison {
        gh_side,
        av_side,
        continuous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::is_equivalent;
    use crate::scalar::{int, rat, Rational};

    fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    fn handcuff(m: [u64; 3]) -> CurveFamily<Rational> {
        let g = WeightedMetricGraph::handcuff(int(1), int(1), int(1)).unwrap();
        CurveFamily::new(g, m.to_vec()).unwrap()
    }

    #[test]
    fn av_limits() {
        let one = AVFamily::new(mat(&[&[7]]), None, None).unwrap();
        assert_eq!(av_family_limit(&one, 1e-9).unwrap().gram.gram(), &mat(&[&[4]]));
        let f = AVFamily::new(mat(&[&[1, 0], &[0, 2]]), None, None).unwrap();
        let expected = Matrix::diagonal(&[rat(4, 3), rat(8, 3)]);
        assert_eq!(av_family_limit(&f, 1e-9).unwrap().gram.gram(), &expected);
        assert!(AVFamily::new(mat(&[&[1, 2], &[2, 1]]), None, None).is_err());
        assert!(AVFamily::new(mat(&[&[0]]), None, None).is_err());
    }

    #[test]
    fn abelian_block_is_dropped() {
        let f = AVFamily::new(mat(&[&[3]]), Some(mat(&[&[1, 0], &[0, 1]])), Some(Matrix::zeros(2, 1)))
            .unwrap();
        assert_eq!((f.torus_rank(), f.abelian_rank()), (1, 2));
        assert_eq!(av_family_limit(&f, 1e-9).unwrap().dim(), 1);
        let ext = mat(&[&[1], &[0]]);
        assert_eq!(
            AVFamily::new(mat(&[&[3]]), Some(Matrix::identity(2)), Some(ext)),
            Err(Error::NontrivialRaynaud)
        );
    }

    #[test]
    fn numeric_oracle_matches() {
        let f = AVFamily::new(mat(&[&[2, 1], &[1, 3]]), None, None).unwrap();
        let exact = av_family_limit(&f, 1e-9).unwrap().gram.to_f64();
        let num = av_family_numeric_oracle(&f, &[1e-8], 1e-9).unwrap();
        assert!(num[0].gram.gram().close_to(exact.gram(), 1e-6));
        assert!(av_family_numeric_oracle(&f, &[1.5], 1e-9).is_err());
    }

    #[test]
    fn gh_limits() {
        let h = curve_family_gh_limit(&handcuff([1, 2, 3])).unwrap();
        assert!(h.edges().iter().all(|e| e.length == rat(1, 2)));
        let l = CurveFamily::new(WeightedMetricGraph::single_loop(1, int(1)).unwrap(), vec![9]).unwrap();
        assert_eq!(curve_family_gh_limit(&l).unwrap().edges()[0].length, int(2));
        let seg = WeightedMetricGraph::new(vec![(1, 1), (2, 1)], vec![(1, 2, int(1))]).unwrap();
        let s = CurveFamily::new(seg, vec![4]).unwrap();
        assert_eq!(curve_family_gh_limit(&s).unwrap().edges()[0].length, int(1));
        let smooth = WeightedMetricGraph::<Rational>::new(vec![(1, 2)], vec![]).unwrap();
        let s = CurveFamily::new(smooth, vec![]).unwrap();
        assert_eq!(curve_family_gh_limit(&s), Err(Error::NoCollapse));
    }

    #[test]
    fn rejects_unstable_or_bad_multiplicities() {
        let loop0 = WeightedMetricGraph::single_loop(0, int(1)).unwrap();
        assert!(CurveFamily::new(loop0, vec![1]).is_err());
        let g = WeightedMetricGraph::handcuff(int(1), int(1), int(1)).unwrap();
        assert!(CurveFamily::new(g.clone(), vec![1, 0, 1]).is_err());
        assert!(CurveFamily::new(g, vec![1, 1]).is_err());
    }

    #[test]
    fn hybrid_lengths() {
        let lens = |f: &CurveFamily<Rational>, gl| {
            curve_family_hybrid_limit(f, gl)
                .unwrap()
                .edges()
                .iter()
                .map(|e| e.length.clone())
                .collect::<Vec<_>>()
        };
        let f = handcuff([1, 2, 3]);
        assert_eq!(lens(&f, GluingFunction::Log), vec![rat(1, 6), rat(1, 3), rat(1, 2)]);
        assert_eq!(lens(&f, GluingFunction::LogLog), vec![rat(1, 3); 3]);
        assert_eq!(lens(&handcuff([4, 4, 4]), GluingFunction::Log), vec![rat(1, 3); 3]);
        assert_eq!(lens(&handcuff([2, 4, 6]), GluingFunction::Log), lens(&f, GluingFunction::Log));
    }

    #[test]
    fn collar_matches_closed_form() {
        // π∫csc(πx)dx over [a, 1−a] equals 2·log cot(πa/2).
        for (t, c) in [(1e-4, 0.5), (1e-8, 0.3), (1e-4, 0.17), (1e-30, 0.9)] {
            let a: f64 = f64::ln(c) / f64::ln(t);
            let closed = 2.0 * (1.0 / (PI * a / 2.0).tan()).ln();
            let v = collar_length(Complex64::new(t, 0.0), c).unwrap();
            assert!(((v - closed) / closed).abs() < 1e-6, "{t} {c}: {v} vs {closed}");
        }
    }

    #[test]
    fn collar_depends_on_modulus_only() {
        let a = collar_length(Complex64::new(1e-5, 0.0), 0.5).unwrap();
        let b = collar_length(Complex64::from_polar(1e-5, 2.1), 0.5).unwrap();
        assert!((a - b).abs() < 1e-9);
        assert!(collar_length(Complex64::new(0.1, 0.0), 0.5).is_err());
        assert!(collar_length(Complex64::new(1e-5, 0.0), 1.5).is_err());
    }

    #[test]
    fn torelli_comparisons() {
        let c = torelli_family_compare(&handcuff([1, 2, 3]), 1e-9).unwrap();
        assert!(!c.continuous);
        let i2 = QuadraticForm::<Rational>::identity(2);
        assert!(is_homothetic(&c.gh_side.gram, &i2, 0.0).unwrap().is_some());
        let d12 = QuadraticForm::diagonal(&[int(1), int(2)]).unwrap();
        assert!(is_homothetic(&c.av_side.gram, &d12, 0.0).unwrap().is_some());
        assert!(torelli_family_compare(&handcuff([5, 5, 7]), 1e-9).unwrap().continuous);
        let l = CurveFamily::new(WeightedMetricGraph::single_loop(1, int(1)).unwrap(), vec![3]).unwrap();
        let c = torelli_family_compare(&l, 1e-9).unwrap();
        assert!(c.continuous);
        assert!(is_equivalent(&c.gh_side.gram, &QuadraticForm::diagonal(&[int(4)]).unwrap()).unwrap().is_some());
        let seg = WeightedMetricGraph::new(vec![(1, 1), (2, 1)], vec![(1, 2, int(1))]).unwrap();
        assert_eq!(
            torelli_family_compare(&CurveFamily::new(seg, vec![1]).unwrap(), 1e-9),
            Err(Error::TreeGraph)
        );
    }
}
