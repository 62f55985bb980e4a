//! JSON schemas for command input and output.
//!
//! Exact numbers are written as JSON integers when they are integral and fit
//! in 64 bits, and as `"p/q"` strings otherwise. On input, integers, `"p/q"`
//! strings, decimal strings and floats are all accepted; floats are read via
//! their shortest decimal representation.

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::Deserialize;
use serde_json::{json, Value};

use troplab::forms::{FlatTorus, LimitSpace, QuadraticForm};
use troplab::limits::{Convention, MonomialEntry, SymbolicSiegelPath};
use troplab::scalar::{parse_rational, rational_as_i64, rational_from_decimal};
use troplab::siegel::SiegelPoint;
use troplab::tropical::WeightedMetricGraph;
use troplab::{Matrix, Rational, Result, Scalar};

/// A scalar type that can be written back as JSON.
pub trait JsonScalar: Scalar {
    const MODE: Mode;
    fn to_json(&self) -> Value;
}

impl JsonScalar for Rational {
    const MODE: Mode = Mode::Exact;
    fn to_json(&self) -> Value {
        match rational_as_i64(self) {
            Some(i) => json!(i),
            None => json!(self.to_string()),
        }
    }
}

impl JsonScalar for f64 {
    const MODE: Mode = Mode::Float;
    fn to_json(&self) -> Value {
        json!(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

/// An exactly parsed number.
#[derive(Debug, Clone, PartialEq)]
pub struct Num(pub Rational);

impl Num {
    pub fn get<T: Scalar>(&self) -> T {
        T::from_rational(&self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Int(i) => Ok(Rational::from_integer(i.into())),
            Raw::Float(x) => rational_from_decimal(x),
            Raw::Text(s) => parse_rational(&s),
        };
        parsed.map(Num).map_err(de::Error::custom)
    }
}

pub type NumMatrix = Vec<Vec<Num>>;

pub fn matrix<T: Scalar>(rows: &NumMatrix) -> Result<Matrix<T>> {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(Num::get).collect()).collect())
}

pub fn vector<T: Scalar>(v: &[Num]) -> Vec<T> {
    v.iter().map(Num::get).collect()
}

pub fn check_dim(declared: Option<usize>, found: usize) -> Result<()> {
    match declared {
        Some(n) if n != found => Err(troplab::Error::DimensionMismatch { expected: n, found }),
        _ => Ok(()),
    }
}

/// `{"n", "entries", "mode"}`; `"gram"` is accepted for `"entries"`. Other
/// fields, such as a torus's `certified_diameter`, are ignored.
#[derive(Debug, Deserialize)]
pub struct FormIn {
    pub n: Option<usize>,
    #[serde(alias = "gram")]
    pub entries: NumMatrix,
    #[serde(default)]
    pub mode: Mode,
}

impl FormIn {
    pub fn form<T: Scalar>(&self) -> Result<QuadraticForm<T>> {
        check_dim(self.n, self.entries.len())?;
        QuadraticForm::new(matrix(&self.entries)?)
    }
}

/// `{"g", "X", "Y", "mode"}`; `X` defaults to zero.
#[derive(Debug, Deserialize)]
pub struct PointIn {
    pub g: Option<usize>,
    #[serde(rename = "X")]
    pub x: Option<NumMatrix>,
    #[serde(rename = "Y")]
    pub y: NumMatrix,
    #[serde(default)]
    pub mode: Mode,
}

impl PointIn {
    pub fn point<T: Scalar>(&self) -> Result<SiegelPoint<T>> {
        let g = self.y.len();
        check_dim(self.g, g)?;
        let x = match &self.x {
            Some(x) => matrix(x)?,
            None => Matrix::zeros(g, g),
        };
        SiegelPoint::new(x, QuadraticForm::new(matrix(&self.y)?)?)
    }
}

/// `{"c", "e"}`, or a bare number for a constant.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum EntryIn {
    Monomial { c: Num, e: Num },
    Constant(Num),
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionIn {
    #[default]
    SToInfinity,
    TToZero,
}

/// Monomial path `X(s) + i·B(s)ᵀ·diag(D(s))·B(s)`.
#[derive(Debug, Deserialize)]
pub struct PathIn {
    #[serde(default)]
    pub convention: ConventionIn,
    #[serde(rename = "X")]
    pub x: Option<Vec<Vec<EntryIn>>>,
    #[serde(rename = "B")]
    pub b: Option<Vec<Vec<EntryIn>>>,
    #[serde(rename = "D")]
    pub d: Vec<EntryIn>,
    #[serde(default)]
    pub mode: Mode,
}

impl PathIn {
    pub fn path<T: Scalar>(&self) -> Result<SymbolicSiegelPath<T>> {
        let conv = match self.convention {
            ConventionIn::SToInfinity => Convention::SToInfinity,
            ConventionIn::TToZero => Convention::TToZero,
        };
        let entry = |e: &EntryIn| match e {
            EntryIn::Monomial { c, e } => MonomialEntry::new(c.get(), e.get(), conv),
            EntryIn::Constant(c) => MonomialEntry::constant(c.get()),
        };
        let g = self.d.len();
        let grid = |m: &Option<Vec<Vec<EntryIn>>>, unit: bool| -> Result<Matrix<MonomialEntry<T>>> {
            match m {
                Some(rows) => Matrix::from_rows(rows.iter().map(|r| r.iter().map(entry).collect()).collect()),
                None => Ok(Matrix::from_fn(g, g, |i, j| {
                    if unit && i == j {
                        MonomialEntry::constant(T::one())
                    } else {
                        MonomialEntry::zero()
                    }
                })),
            }
        };
        let d = self.d.iter().map(entry).collect();
        SymbolicSiegelPath::new(grid(&self.x, false)?, grid(&self.b, true)?, d)
    }
}

#[derive(Debug, Deserialize)]
pub struct VertexIn {
    pub id: i64,
    #[serde(default)]
    pub w: u32,
}

#[derive(Debug, Deserialize)]
pub struct EdgeIn {
    pub u: i64,
    pub v: i64,
    pub len: Option<Num>,
}

/// `{"vertices": [{"id", "w"}], "edges": [{"u", "v", "len"}]}`; missing
/// lengths are 1.
#[derive(Debug, Deserialize)]
pub struct GraphIn {
    pub vertices: Vec<VertexIn>,
    #[serde(default)]
    pub edges: Vec<EdgeIn>,
    #[serde(default)]
    pub mode: Mode,
}

impl GraphIn {
    pub fn graph<T: Scalar>(&self) -> Result<WeightedMetricGraph<T>> {
        WeightedMetricGraph::new(
            self.vertices.iter().map(|v| (v.id, v.w)).collect(),
            self.edges
                .iter()
                .map(|e| (e.u, e.v, e.len.as_ref().map_or_else(T::one, Num::get)))
                .collect(),
        )
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexIn {
    Real(f64),
    Pair([f64; 2]),
    Parts { re: f64, im: f64 },
}

impl ComplexIn {
    pub fn value(&self) -> Complex64 {
        match *self {
            ComplexIn::Real(x) => Complex64::new(x, 0.0),
            ComplexIn::Pair([re, im]) | ComplexIn::Parts { re, im } => Complex64::new(re, im),
        }
    }
}

pub fn vec_json<T: JsonScalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(JsonScalar::to_json).collect())
}

pub fn matrix_json<T: JsonScalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|i| vec_json(m.row(i))).collect())
}

pub fn int_matrix_json(m: &Matrix<i64>) -> Value {
    Value::Array((0..m.rows()).map(|i| json!(m.row(i))).collect())
}

pub fn form_json<T: JsonScalar>(f: &QuadraticForm<T>) -> Value {
    json!({ "n": f.dim(), "entries": matrix_json(f.gram()), "mode": T::MODE.name() })
}

pub fn torus_json<T: JsonScalar>(t: &FlatTorus<T>) -> Value {
    let mut v = form_json(&t.gram);
    if let Some(c) = t.scale_certified_diameter {
        v["certified_diameter"] = json!({ "value": c.value, "tol": c.tol });
    }
    v
}

pub fn point_json<T: JsonScalar>(z: &SiegelPoint<T>) -> Value {
    json!({
        "g": z.g(),
        "X": matrix_json(&z.x),
        "Y": matrix_json(z.y.gram()),
        "mode": T::MODE.name(),
    })
}

pub fn graph_json<T: JsonScalar>(g: &WeightedMetricGraph<T>) -> Value {
    let vs = g.vertices();
    json!({
        "vertices": vs.iter().map(|v| json!({ "id": v.id, "w": v.weight })).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|e| json!({
            "u": vs[e.u].id,
            "v": vs[e.v].id,
            "len": e.length.to_json(),
        })).collect::<Vec<_>>(),
        "mode": T::MODE.name(),
    })
}

pub fn limit_space_json<T: JsonScalar>(l: &LimitSpace<T>) -> Value {
    json!({
        "circle_circumferences": vec_json(&l.circle_circumferences),
        "euclidean_rank": l.euclidean_rank,
        "torus": l.torus_part.as_ref().map(torus_json),
    })
}
