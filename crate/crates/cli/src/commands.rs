use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use troplab::degen::{
    av_family_limit, av_family_numeric_oracle, collar_length, curve_family_gh_limit, curve_family_hybrid_limit,
    torelli_family_compare, AVFamily, CurveFamily,
};
use troplab::hybrid::{
    dual_complex, hybrid_limit, pushforward_map, quotient_complex, tropicalize, CellLabel, DualComplex,
    GluingFunction, GroupAction, IncidenceComplex, MonomialPathChart,
};
use troplab::limits::{
    classify_collapse_numeric, classify_collapse_symbolic, fixed_injrad_limit, fixed_volume_limit, CollapseKind,
    CollapseResult,
};
use troplab::siegel::{metric_matrix, siegel_reduce, u0, SiegelPoint};
use troplab::{Matrix, Rational};

use crate::json::*;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Input(String),
    Math(troplab::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
            CliError::Math(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Input(m) => write!(f, "malformed input: {m}"),
            CliError::Math(e) => write!(f, "precondition failed: {e}"),
        }
    }
}

impl From<troplab::Error> for CliError {
    fn from(e: troplab::Error) -> Self {
        CliError::Math(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub struct Config {
    pub tol: f64,
    pub max_iterations: usize,
}

pub struct Output {
    pub json: Value,
    /// Header and rows for `--emit-csv`.
    pub table: Option<(Vec<String>, Vec<Vec<f64>>)>,
}

impl From<Value> for Output {
    fn from(json: Value) -> Self {
        Output { json, table: None }
    }
}

/// Deserializes with the JSON pointer of the first offending field.
pub fn parse<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Input(format!("at {path}: {}", e.into_inner()))
    })
}

macro_rules! by_mode {
    ($mode:expr, $f:ident ( $($arg:expr),* )) => {
        match $mode {
            Mode::Exact => $f::<Rational>($($arg),*),
            Mode::Float => $f::<f64>($($arg),*),
        }
    };
}

fn gamma_json(m: &Matrix<i64>) -> Value {
    int_matrix_json(m)
}

pub fn reduce(text: &str, cfg: &Config) -> CliResult<Output> {
    let p: PointIn = parse(text)?;
    fn go<T: JsonScalar>(p: &PointIn, cfg: &Config) -> CliResult<Output> {
        let z: SiegelPoint<T> = p.point()?;
        let u = T::from_i64(u0(z.g()));
        let red = siegel_reduce(&z, &u, cfg.max_iterations)?;
        Ok(json!({
            "point": point_json(&red.point),
            "gamma": gamma_json(red.gamma.matrix()),
            "in_siegel_set": red.success,
            "metric_matrix": form_json(&metric_matrix(&red.point)),
        })
        .into())
    }
    by_mode!(p.mode, go(&p, cfg))
}

fn collapse_json<T: JsonScalar>(c: &CollapseResult<T>) -> Value {
    json!({
        "kind": match c.kind {
            CollapseKind::Collapsing => "collapsing",
            CollapseKind::NonDegenerate => "non_degenerate",
        },
        "r": c.r,
        "limit": torus_json(&c.limit),
        "profile": vec_json(&c.profile),
    })
}

pub fn collapse_symbolic(text: &str, cfg: &Config) -> CliResult<Output> {
    let p: PathIn = parse(text)?;
    fn go<T: JsonScalar>(p: &PathIn, cfg: &Config) -> CliResult<Output> {
        let path = p.path::<T>()?;
        Ok(collapse_json(&classify_collapse_symbolic(&path, cfg.tol)?).into())
    }
    by_mode!(p.mode, go(&p, cfg))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumericIn {
    Samples { samples: Vec<PointIn> },
    Path { path: PathIn, s: Vec<f64> },
}

pub fn collapse_numeric(text: &str, cfg: &Config) -> CliResult<Output> {
    let input: NumericIn = parse(text)?;
    let points: Vec<SiegelPoint<f64>> = match &input {
        NumericIn::Samples { samples } => samples.iter().map(PointIn::point).collect::<Result<_, _>>()?,
        NumericIn::Path { path, s } => {
            let path = path.path::<Rational>()?;
            s.iter().map(|&s| path.sample(s)).collect::<Result<_, _>>()?
        }
    };
    let res = classify_collapse_numeric(&points, cfg.tol)?;
    let rep = &res.report;
    let mut out = collapse_json(&res.result);
    out["report"] = json!({
        "ratios": rep.ratios,
        "top": rep.top,
        "collapsed": rep.collapsed,
        "tail_spread": rep.tail_spread,
    });
    let g = points[0].g();
    let mut header = vec!["sample".to_string(), "d_g".to_string()];
    header.extend((1..=g).map(|j| format!("ratio_{j}")));
    let rows = rep
        .ratios
        .iter()
        .zip(&rep.top)
        .enumerate()
        .map(|(k, (r, top))| {
            let mut row = vec![k as f64, *top];
            row.extend(r);
            row
        })
        .collect();
    Ok(Output {
        json: out,
        table: Some((header, rows)),
    })
}

pub fn volume_limit(text: &str, _cfg: &Config) -> CliResult<Output> {
    let p: PathIn = parse(text)?;
    fn go<T: JsonScalar>(p: &PathIn) -> CliResult<Output> {
        Ok(limit_space_json(&fixed_volume_limit(&p.path::<T>()?)?).into())
    }
    by_mode!(p.mode, go(&p))
}

#[derive(Deserialize)]
struct InjradIn {
    a: Vec<Num>,
    r: usize,
    u: Option<Num>,
    #[serde(default)]
    mode: Mode,
}

pub fn injrad_limit(text: &str, _cfg: &Config) -> CliResult<Output> {
    let p: InjradIn = parse(text)?;
    fn go<T: JsonScalar>(p: &InjradIn) -> CliResult<Output> {
        let a: Vec<T> = vector(&p.a);
        let u = p.u.as_ref().map_or_else(|| T::from_i64(u0(a.len().max(1))), Num::get);
        Ok(limit_space_json(&fixed_injrad_limit(&a, p.r, &u)?).into())
    }
    by_mode!(p.mode, go(&p))
}

#[derive(Deserialize)]
struct AvFamilyIn {
    r: Option<usize>,
    #[serde(rename = "M")]
    m: NumMatrix,
    abelian: Option<NumMatrix>,
    extension: Option<NumMatrix>,
    t_samples: Option<Vec<f64>>,
    #[serde(default)]
    mode: Mode,
}

pub fn av_limit(text: &str, cfg: &Config) -> CliResult<Output> {
    let p: AvFamilyIn = parse(text)?;
    fn go<T: JsonScalar>(p: &AvFamilyIn, cfg: &Config) -> CliResult<Output> {
        check_dim(p.r, p.m.len())?;
        let opt = |m: &Option<NumMatrix>| m.as_ref().map(matrix::<T>).transpose();
        let fam = AVFamily::new(matrix(&p.m)?, opt(&p.abelian)?, opt(&p.extension)?)?;
        let limit = av_family_limit(&fam, cfg.tol)?;
        let mut out = json!({
            "torus_rank": fam.torus_rank(),
            "abelian_rank": fam.abelian_rank(),
            "limit": torus_json(&limit),
        });
        if let Some(ts) = &p.t_samples {
            let oracle = av_family_numeric_oracle(&fam, ts, cfg.tol)?;
            out["oracle"] = ts
                .iter()
                .zip(&oracle)
                .map(|(t, torus)| json!({ "t": t, "limit": torus_json(torus) }))
                .collect();
        }
        Ok(out.into())
    }
    by_mode!(p.mode, go(&p, cfg))
}

#[derive(Deserialize)]
struct CurveFamilyIn {
    graph: GraphIn,
    multiplicities: Vec<u64>,
}

impl CurveFamilyIn {
    fn family<T: JsonScalar>(&self) -> CliResult<CurveFamily<T>> {
        Ok(CurveFamily::new(self.graph.graph()?, self.multiplicities.clone())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CurveGluing {
    Gh,
    Log,
    Loglog,
}

pub fn curve_limit(text: &str, gluing: CurveGluing) -> CliResult<Output> {
    let p: CurveFamilyIn = parse(text)?;
    fn go<T: JsonScalar>(p: &CurveFamilyIn, gluing: CurveGluing) -> CliResult<Output> {
        let fam = p.family::<T>()?;
        let (name, graph) = match gluing {
            CurveGluing::Gh => ("gh", curve_family_gh_limit(&fam)?),
            CurveGluing::Log => ("log", curve_family_hybrid_limit(&fam, GluingFunction::Log)?),
            CurveGluing::Loglog => ("loglog", curve_family_hybrid_limit(&fam, GluingFunction::LogLog)?),
        };
        Ok(json!({ "gluing": name, "genus": fam.genus(), "graph": graph_json(&graph) }).into())
    }
    by_mode!(p.graph.mode, go(&p, gluing))
}

pub fn trop_jac(text: &str, _cfg: &Config) -> CliResult<Output> {
    let p: GraphIn = parse(text)?;
    fn go<T: JsonScalar>(p: &GraphIn) -> CliResult<Output> {
        let g = p.graph::<T>()?;
        let alpha = g.cycle_basis();
        let jac = g.tropical_jacobian_with_basis(&alpha)?;
        Ok(json!({
            "rank": jac.rank,
            "gram": matrix_json(jac.gram.gram()),
            "cycle_basis": int_matrix_json(&alpha),
            "mode": T::MODE.name(),
        })
        .into())
    }
    by_mode!(p.mode, go(&p))
}

pub fn torelli_check(text: &str, cfg: &Config) -> CliResult<Output> {
    let p: CurveFamilyIn = parse(text)?;
    fn go<T: JsonScalar>(p: &CurveFamilyIn, cfg: &Config) -> CliResult<Output> {
        let c = torelli_family_compare(&p.family::<T>()?, cfg.tol)?;
        Ok(json!({
            "gh_side": torus_json(&c.gh_side),
            "av_side": torus_json(&c.av_side),
            "continuous": c.continuous,
        })
        .into())
    }
    by_mode!(p.graph.mode, go(&p, cfg))
}

#[derive(Deserialize)]
struct IncidenceIn {
    n: usize,
    strata: Vec<Vec<usize>>,
    #[serde(default)]
    action: Vec<Vec<usize>>,
}

fn complex_json(c: &DualComplex) -> Value {
    let cells: Vec<Value> = c
        .cells
        .iter()
        .map(|layer| {
            layer
                .iter()
                .map(|cell| {
                    let mut v = json!({ "faces": cell.faces, "orbit_size": cell.orbit_size });
                    match &cell.label {
                        CellLabel::Stratum(s) => v["stratum"] = json!(s),
                        CellLabel::Chain(ch) => v["chain"] = json!(ch),
                    }
                    v
                })
                .collect()
        })
        .collect();
    json!({
        "counts": c.cell_counts(),
        "euler_characteristic": c.euler_characteristic(),
        "cells": cells,
    })
}

pub fn dual_complex_cmd(text: &str, _cfg: &Config) -> CliResult<Output> {
    let p: IncidenceIn = parse(text)?;
    let inc = IncidenceComplex::generated_by(p.n, p.strata)?;
    let c = dual_complex(&inc);
    let mut out = complex_json(&c);
    if !p.action.is_empty() {
        let group = GroupAction::generated_by(p.n, p.action)?;
        let mut q = complex_json(&quotient_complex(&c, &group)?);
        q["group_order"] = json!(group.order());
        out["quotient"] = q;
    }
    Ok(out.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HybridGluing {
    Log,
    Loglog,
}

#[derive(Deserialize)]
struct HybridIn {
    exponents: Vec<Num>,
    strata: Option<Vec<Vec<usize>>>,
    map: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    mode: Mode,
}

pub fn hybrid_limit_cmd(text: &str, gluing: HybridGluing) -> CliResult<Output> {
    let p: HybridIn = parse(text)?;
    let f = match gluing {
        HybridGluing::Log => GluingFunction::Log,
        HybridGluing::Loglog => GluingFunction::LogLog,
    };
    fn go<T: JsonScalar>(p: &HybridIn, f: GluingFunction) -> CliResult<Output> {
        let exps: Vec<T> = vector(&p.exponents);
        let chart = match &p.strata {
            Some(s) => MonomialPathChart::new(exps, &IncidenceComplex::generated_by(p.exponents.len(), s.clone())?)?,
            None => MonomialPathChart::in_simplex(exps)?,
        };
        let lim = hybrid_limit(&chart, f)?;
        let mut out = json!({
            "gluing": match f { GluingFunction::Log => "log", GluingFunction::LogLog => "loglog" },
            "coords": vec_json(&lim.coords),
            "support": lim.support,
        });
        if let Some(rows) = &p.map {
            let m = Matrix::from_rows(rows.clone())?;
            out["pushforward"] = vec_json(&pushforward_map(&m, &lim.coords)?);
            out["image_limit"] = vec_json(&hybrid_limit(&chart.pushed(&m)?, f)?.coords);
        }
        Ok(out.into())
    }
    by_mode!(p.mode, go(&p, f))
}

#[derive(Deserialize)]
struct TropicalizeIn {
    points: Vec<Vec<ComplexIn>>,
}

pub fn tropicalize_cmd(text: &str, cfg: &Config) -> CliResult<Output> {
    let p: TropicalizeIn = parse(text)?;
    let pts: Vec<Vec<_>> = p.points.iter().map(|v| v.iter().map(ComplexIn::value).collect()).collect();
    let t = tropicalize(&pts, cfg.tol)?;
    let n = t.vectors.first().map_or(0, Vec::len);
    let mut header = vec!["sample".to_string()];
    header.extend((1..=n).map(|i| format!("v_{i}")));
    let rows = t
        .vectors
        .iter()
        .enumerate()
        .map(|(k, v)| std::iter::once(k as f64).chain(v.iter().copied()).collect())
        .collect();
    Ok(Output {
        json: json!({ "vectors": t.vectors, "direction": t.direction }),
        table: Some((header, rows)),
    })
}

#[derive(Deserialize)]
struct CollarIn {
    c_star: f64,
    t: Option<ComplexIn>,
    #[serde(default)]
    t_samples: Vec<ComplexIn>,
    #[serde(default)]
    decades: Vec<i32>,
}

pub fn collar(text: &str, _cfg: &Config) -> CliResult<Output> {
    let p: CollarIn = parse(text)?;
    let mut ts: Vec<_> = p.t.iter().chain(&p.t_samples).map(ComplexIn::value).collect();
    ts.extend(p.decades.iter().map(|&k| num_complex::Complex64::new(10f64.powi(-k), 0.0)));
    if ts.is_empty() {
        return Err(CliError::Input("give at least one of \"t\", \"t_samples\", \"decades\"".into()));
    }
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    for t in ts {
        let len = collar_length(t, p.c_star)?;
        let offset = len - 2.0 * (-t.norm().ln()).ln();
        samples.push(json!({ "t": [t.re, t.im], "length": len, "offset": offset }));
        rows.push(vec![t.norm(), len, offset]);
    }
    Ok(Output {
        json: json!({ "c_star": p.c_star, "samples": samples }),
        table: Some((vec!["abs_t".into(), "length".into(), "offset".into()], rows)),
    })
}
