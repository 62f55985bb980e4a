//! Dual complexes of boundary divisors, their quotients by finite groups, and
//! hybrid limits of monomial paths.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Divisors `1..=n` and the index sets of their nonempty intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceComplex {
    n: usize,
    /// Sorted by size, then lexicographically; each stratum sorted.
    strata: Vec<Vec<usize>>,
}

impl IncidenceComplex {
    /// Requires every nonempty subset of a stratum to be listed as well.
    pub fn new(n: usize, strata: Vec<Vec<usize>>) -> Result<Self> {
        let set = Self::normalize(n, strata)?;
        for s in &set {
            for skip in 0..s.len() {
                if s.len() == 1 {
                    break;
                }
                let mut face = s.clone();
                face.remove(skip);
                if !set.contains(&face) {
                    return Err(Error::InvalidIncidence(format!(
                        "stratum {s:?} is listed but its face {face:?} is not"
                    )));
                }
            }
        }
        Ok(Self::from_set(n, set))
    }

    /// Closes the given strata under taking nonempty subsets.
    pub fn generated_by(n: usize, strata: Vec<Vec<usize>>) -> Result<Self> {
        let gens = Self::normalize(n, strata)?;
        let mut set = BTreeSet::new();
        for s in gens {
            let k = s.len();
            for mask in 1..(1u64 << k) {
                let sub: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect();
                set.insert(sub);
            }
        }
        Ok(Self::from_set(n, set))
    }

    /// The full simplex on `n` divisors.
    pub fn simplex(n: usize) -> Self {
        Self::generated_by(n, vec![(1..=n).collect()]).expect("valid ids")
    }

    fn normalize(n: usize, strata: Vec<Vec<usize>>) -> Result<BTreeSet<Vec<usize>>> {
        if n > 63 {
            return Err(Error::InvalidIncidence("at most 63 divisors are supported".into()));
        }
        let mut set = BTreeSet::new();
        for mut s in strata {
            if s.is_empty() {
                return Err(Error::InvalidIncidence("empty stratum".into()));
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidIncidence(format!("repeated divisor in {s:?}")));
            }
            if let Some(&bad) = s.iter().find(|&&i| i == 0 || i > n) {
                return Err(Error::InvalidIncidence(format!("divisor {bad} outside 1..={n}")));
            }
            set.insert(s);
        }
        Ok(set)
    }

    fn from_set(n: usize, set: BTreeSet<Vec<usize>>) -> Self {
        let mut strata: Vec<Vec<usize>> = set.into_iter().collect();
        strata.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        IncidenceComplex { n, strata }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn strata(&self) -> &[Vec<usize>] {
        &self.strata
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.strata.binary_search_by(|t| t.len().cmp(&s.len()).then_with(|| t.as_slice().cmp(s))).is_ok()
    }
}

/// What a cell stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellLabel {
    /// A stratum of the incidence data.
    Stratum(Vec<usize>),
    /// An orbit of flags `S₀ ⊂ … ⊂ S_k` of strata, given by a representative.
    Chain(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    /// Face `i` omits the `i`-th vertex; entries index the cells one
    /// dimension lower.
    pub faces: Vec<usize>,
    pub label: CellLabel,
    /// Number of cells of the cover identified into this one.
    pub orbit_size: usize,
}

/// A Δ-complex: cells of each dimension with ordered face maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualComplex {
    pub cells: Vec<Vec<Cell>>,
}

impl DualComplex {
    pub fn dim(&self) -> Option<usize> {
        self.cells.len().checked_sub(1)
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) })
            .sum()
    }

    /// Checks `∂_i ∂_j = ∂_{j−1} ∂_i` for `i < j` on every cell.
    pub fn satisfies_face_identities(&self) -> bool {
        for k in 2..self.cells.len() {
            for cell in &self.cells[k] {
                for j in 0..=k {
                    for i in 0..j {
                        let lhs = self.cells[k - 1][cell.faces[j]].faces[i];
                        let rhs = self.cells[k - 1][cell.faces[i]].faces[j - 1];
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// One `(|S|−1)`-cell per stratum `S`, faces by dropping one divisor.
pub fn dual_complex(inc: &IncidenceComplex) -> DualComplex {
    let top = inc.strata.iter().map(Vec::len).max().unwrap_or(0);
    let by_dim: Vec<Vec<&Vec<usize>>> = (1..=top)
        .map(|size| inc.strata.iter().filter(|s| s.len() == size).collect())
        .collect();
    let index: Vec<HashMap<&Vec<usize>, usize>> = by_dim
        .iter()
        .map(|cells| cells.iter().enumerate().map(|(i, s)| (*s, i)).collect())
        .collect();
    let cells = by_dim
        .iter()
        .enumerate()
        .map(|(k, layer)| {
            layer
                .iter()
                .map(|s| {
                    let faces = if k == 0 {
                        Vec::new()
                    } else {
                        (0..s.len())
                            .map(|i| {
                                let mut f = (*s).clone();
                                f.remove(i);
                                index[k - 1][&f]
                            })
                            .collect()
                    };
                    Cell {
                        faces,
                        label: CellLabel::Stratum((*s).clone()),
                        orbit_size: 1,
                    }
                })
                .collect()
        })
        .collect();
    DualComplex { cells }
}

/// A finite group of permutations of the divisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    n: usize,
    /// `elements[g][i − 1]` is the image of divisor `i`; sorted, identity
    /// included.
    elements: Vec<Vec<usize>>,
}

impl GroupAction {
    /// The group generated by the given permutations (1-based images).
    pub fn generated_by(n: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        for p in &generators {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if sorted != (1..=n).collect::<Vec<_>>() {
                return Err(Error::InvalidIncidence(format!("{p:?} is not a permutation of 1..={n}")));
            }
        }
        let identity: Vec<usize> = (1..=n).collect();
        let mut elements = BTreeSet::from([identity.clone()]);
        let mut frontier = vec![identity];
        while let Some(g) = frontier.pop() {
            for h in &generators {
                let gh: Vec<usize> = (0..n).map(|i| g[h[i] - 1]).collect();
                if elements.insert(gh.clone()) {
                    frontier.push(gh);
                }
            }
        }
        Ok(GroupAction {
            n,
            elements: elements.into_iter().collect(),
        })
    }

    pub fn trivial(n: usize) -> Self {
        GroupAction {
            n,
            elements: vec![(1..=n).collect()],
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    fn image(g: &[usize], s: &[usize]) -> Vec<usize> {
        let mut t: Vec<usize> = s.iter().map(|&i| g[i - 1]).collect();
        t.sort_unstable();
        t
    }
}

/// Quotient of a dual complex by a group action, computed on the barycentric
/// subdivision: `k`-cells are orbits of flags `S₀ ⊊ … ⊊ S_k` of strata.
pub fn quotient_complex(c: &DualComplex, action: &GroupAction) -> Result<DualComplex> {
    let mut strata: Vec<Vec<usize>> = Vec::new();
    for layer in &c.cells {
        for cell in layer {
            match &cell.label {
                CellLabel::Stratum(s) => strata.push(s.clone()),
                CellLabel::Chain(_) => {
                    return Err(Error::InvalidParameter(
                        "quotients are taken of dual complexes built from incidence data".into(),
                    ))
                }
            }
        }
    }
    let n = strata.iter().flatten().copied().max().unwrap_or(0);
    if action.n < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: action.n,
        });
    }
    let index: HashMap<Vec<usize>, usize> = strata.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    // perm[g][s] = index of g(S_s).
    let mut perm = Vec::with_capacity(action.order());
    for g in &action.elements {
        let mut row = Vec::with_capacity(strata.len());
        for s in &strata {
            let t = GroupAction::image(g, s);
            match index.get(&t) {
                Some(&i) => row.push(i),
                None => return Err(Error::NotStrataPreserving(g.clone())),
            }
        }
        perm.push(row);
    }

    // Flags of strata ordered by strict inclusion, grouped by length.
    let is_sub = |a: &[usize], b: &[usize]| a.len() < b.len() && a.iter().all(|x| b.contains(x));
    let mut chains: Vec<Vec<Vec<usize>>> = vec![(0..strata.len()).map(|i| vec![i]).collect()];
    loop {
        let next: Vec<Vec<usize>> = chains
            .last()
            .expect("nonempty")
            .iter()
            .flat_map(|ch| {
                let last = *ch.last().expect("nonempty chain");
                (0..strata.len())
                    .filter(|&j| is_sub(&strata[last], &strata[j]))
                    .map(|j| {
                        let mut c = ch.clone();
                        c.push(j);
                        c
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        if next.is_empty() {
            break;
        }
        chains.push(next);
    }

    let canonical = |ch: &[usize]| -> Vec<usize> {
        perm.iter()
            .map(|p| ch.iter().map(|&s| p[s]).collect::<Vec<_>>())
            .min()
            .expect("group has an identity")
    };
    let mut cells: Vec<Vec<Cell>> = Vec::new();
    let mut orbit_ids: Vec<HashMap<Vec<usize>, usize>> = Vec::new();
    for (k, layer) in chains.iter().enumerate() {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut reps: Vec<(Vec<usize>, usize)> = Vec::new();
        for ch in layer {
            let key = canonical(ch);
            match ids.get(&key) {
                Some(&i) => reps[i].1 += 1,
                None => {
                    ids.insert(key.clone(), reps.len());
                    reps.push((key, 1));
                }
            }
        }
        let layer_cells = reps
            .iter()
            .map(|(rep, size)| {
                let faces = if k == 0 {
                    Vec::new()
                } else {
                    (0..rep.len())
                        .map(|i| {
                            let mut f = rep.clone();
                            f.remove(i);
                            orbit_ids[k - 1][&canonical(&f)]
                        })
                        .collect()
                };
                Cell {
                    faces,
                    label: CellLabel::Chain(rep.iter().map(|&s| strata[s].clone()).collect()),
                    orbit_size: *size,
                }
            })
            .collect();
        cells.push(layer_cells);
        orbit_ids.push(ids);
    }
    Ok(DualComplex { cells })
}

/// Barycentric subdivision, i.e. the quotient by the trivial group.
pub fn barycentric_subdivision(c: &DualComplex) -> Result<DualComplex> {
    let n = c
        .cells
        .iter()
        .flatten()
        .filter_map(|cell| match &cell.label {
            CellLabel::Stratum(s) => s.iter().copied().max(),
            CellLabel::Chain(_) => None,
        })
        .max()
        .unwrap_or(0);
    quotient_complex(c, &GroupAction::trivial(n))
}

/// Replacement for `−log|z|` in the hybrid construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GluingFunction {
    Log,
    LogLog,
}

impl GluingFunction {
    /// `−log|z|` or `log(−log|z|)`, for `0 < |z| < 1`.
    pub fn apply(&self, z_abs: f64) -> f64 {
        match self {
            GluingFunction::Log => -z_abs.ln(),
            GluingFunction::LogLog => (-z_abs.ln()).ln(),
        }
    }
}

/// A path `t → 0` with `|f_i| ≍ |t|^{m_i}` near the boundary divisors.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialPathChart<T> {
    exponents: Vec<T>,
}

impl<T: Scalar> MonomialPathChart<T> {
    /// Exponents must be nonnegative and their support a stratum.
    pub fn new(exponents: Vec<T>, inc: &IncidenceComplex) -> Result<Self> {
        if exponents.len() != inc.n() {
            return Err(Error::DimensionMismatch {
                expected: inc.n(),
                found: exponents.len(),
            });
        }
        let chart = Self::in_simplex(exponents)?;
        let support = chart.support();
        if !support.is_empty() && !inc.contains(&support) {
            return Err(Error::NotAStratum(support));
        }
        Ok(chart)
    }

    /// Every subset of divisors counts as a stratum.
    pub fn in_simplex(exponents: Vec<T>) -> Result<Self> {
        if let Some(i) = exponents.iter().position(|m| *m < T::zero()) {
            return Err(Error::InvalidParameter(format!("exponent {} is negative", i + 1)));
        }
        Ok(MonomialPathChart { exponents })
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    /// 1-based ids of divisors with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        self.exponents
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > T::zero())
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Exponents `m·(m_i)` of the image path under a monomial map.
    pub fn pushed(&self, m: &Matrix<i64>) -> Result<Self> {
        if m.cols() != self.exponents.len() {
            return Err(Error::DimensionMismatch {
                expected: self.exponents.len(),
                found: m.cols(),
            });
        }
        Self::in_simplex(m.cast::<T>().mul_vec(&self.exponents))
    }
}

/// Barycentric coordinates of a limit point on the cell of its support.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridPoint<T> {
    /// One coordinate per divisor, zero off the support.
    pub coords: Vec<T>,
    pub support: Vec<usize>,
}

/// Limit of `f(|f_i|)/Σ_j f(|f_j|)` along the path.
///
/// For `Log` this is `m_i/Σm_j`. For `LogLog` every summand is
/// `log(m_i) + log(L)` with `L → ∞`, so the limit is uniform on the support.
pub fn hybrid_limit<T: Scalar>(path: &MonomialPathChart<T>, f: GluingFunction) -> Result<HybridPoint<T>> {
    let support = path.support();
    if support.is_empty() {
        return Err(Error::NotOnBoundary);
    }
    let coords = match f {
        GluingFunction::Log => {
            let total = path.exponents.iter().fold(T::zero(), |acc, m| acc + m.clone());
            path.exponents.iter().map(|m| m.clone() / total.clone()).collect()
        }
        GluingFunction::LogLog => {
            let share = T::one() / T::from_i64(support.len() as i64);
            path.exponents
                .iter()
                .map(|m| if *m > T::zero() { share.clone() } else { T::zero() })
                .collect()
        }
    };
    Ok(HybridPoint { coords, support })
}

/// `y = m·x / Σ(m·x)` for a nonnegative integer matrix `m` (targets × sources).
pub fn pushforward_map<T: Scalar>(m: &Matrix<i64>, x: &[T]) -> Result<Vec<T>> {
    if m.cols() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: m.cols(),
            found: x.len(),
        });
    }
    if let Some(i) = (0..m.rows()).find(|&i| m.row(i).iter().any(|&v| v < 0)) {
        return Err(Error::InvalidParameter(format!("row {} of the monomial matrix has a negative entry", i + 1)));
    }
    for (j, xj) in x.iter().enumerate() {
        if *xj < T::zero() {
            return Err(Error::InvalidParameter(format!("coordinate {} is negative", j + 1)));
        }
        if *xj > T::zero() && m.column(j).iter().all(|&v| v == 0) {
            return Err(Error::ZeroColumn(j + 1));
        }
    }
    let y = m.cast::<T>().mul_vec(x);
    let total = y.iter().fold(T::zero(), |acc, v| acc + v.clone());
    if total.is_zero() {
        return Err(Error::NotOnBoundary);
    }
    Ok(y.into_iter().map(|v| v / total.clone()).collect())
}

/// `(−log|z_i|)_i` for each sample and the projective limit direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Tropicalization {
    pub vectors: Vec<Vec<f64>>,
    /// Unit vector, present when the samples run off to infinity along a
    /// stable direction.
    pub direction: Option<Vec<f64>>,
}

/// The direction is reported when the norms of the last three vectors
/// increase and their normalizations agree within `tol`.
pub fn tropicalize(points: &[Vec<Complex64>], tol: f64) -> Result<Tropicalization> {
    let mut vectors = Vec::with_capacity(points.len());
    for (k, p) in points.iter().enumerate() {
        if p.iter().any(|z| z.norm() == 0.0) {
            return Err(Error::ZeroCoordinate(k));
        }
        vectors.push(p.iter().map(|z| -z.norm().ln()).collect::<Vec<f64>>());
    }
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let direction = if vectors.len() >= 3 {
        let tail = &vectors[vectors.len() - 3..];
        let norms: Vec<f64> = tail.iter().map(|v| norm(v)).collect();
        let growing = norms[0] > 0.0 && norms.windows(2).all(|w| w[1] > w[0] * (1.0 + tol));
        let units: Vec<Vec<f64>> = tail
            .iter()
            .zip(&norms)
            .map(|(v, &nv)| v.iter().map(|x| x / nv).collect())
            .collect();
        let agree = units.windows(2).all(|w| {
            w[0].iter().zip(&w[1]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= tol
        });
        (growing && agree).then(|| units[2].clone())
    } else {
        None
    };
    Ok(Tropicalization { vectors, direction })
}
