use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn run(args: &[&str], input: &str) -> (i32, String, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_troplab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn ok(args: &[&str], input: Value) -> Value {
    let (code, out, err) = run(args, &input.to_string());
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

fn handcuff(m: [u64; 3]) -> Value {
    json!({
        "graph": {
            "vertices": [{"id": 1}, {"id": 2}],
            "edges": [{"u": 1, "v": 1}, {"u": 2, "v": 2}, {"u": 1, "v": 2}]
        },
        "multiplicities": m
    })
}

#[test]
fn trop_jac_of_a_handcuff() {
    let g = json!({
        "vertices": [{"id": 1}, {"id": 2}],
        "edges": [{"u": 1, "v": 1, "len": 1}, {"u": 2, "v": 2, "len": 2}, {"u": 1, "v": 2, "len": 3}]
    });
    let out = ok(&["trop-jac"], g);
    assert_eq!(out["gram"], json!([[1, 0], [0, 2]]));
    assert_eq!(out["rank"], 2);
}

#[test]
fn torelli_check_detects_discontinuity() {
    assert_eq!(ok(&["torelli-check"], handcuff([1, 2, 3]))["continuous"], false);
    assert_eq!(ok(&["torelli-check"], handcuff([5, 5, 7]))["continuous"], true);
}

#[test]
fn curve_limits_by_gluing() {
    let lens = |gluing: &str| -> Vec<Value> {
        let out = ok(&["curve-limit", "--gluing", gluing], handcuff([1, 2, 3]));
        out["graph"]["edges"].as_array().unwrap().iter().map(|e| e["len"].clone()).collect()
    };
    assert_eq!(lens("gh"), vec![json!("1/2"); 3]);
    assert_eq!(lens("log"), vec![json!("1/6"), json!("1/3"), json!("1/2")]);
    assert_eq!(lens("loglog"), vec![json!("1/3"); 3]);
}

#[test]
fn hybrid_limit_with_map() {
    let out = ok(&["hybrid-limit", "--gluing", "loglog"], json!({"exponents": [1, 2, 3]}));
    assert_eq!(out["coords"], json!(["1/3", "1/3", "1/3"]));
    let out = ok(&["hybrid-limit"], json!({"exponents": [1, 2, 3], "map": [[1, 1, 0], [0, 0, 1]]}));
    assert_eq!(out["coords"], json!(["1/6", "1/3", "1/2"]));
    assert_eq!(out["pushforward"], json!(["1/2", "1/2"]));
    assert_eq!(out["pushforward"], out["image_limit"]);
    let (code, _, err) = run(&["hybrid-limit"], r#"{"exponents": [1, 1, 1], "strata": [[1, 2], [3]]}"#);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn dual_complex_quotients() {
    let out = ok(&["dual-complex"], json!({"n": 2, "strata": [[1, 2]], "action": [[2, 1]]}));
    assert_eq!(out["counts"], json!([2, 1]));
    assert_eq!(out["quotient"]["counts"], json!([2, 1]));
    assert_eq!(out["quotient"]["group_order"], 2);
    let out = ok(&["dual-complex"], json!({"n": 3, "strata": [[1, 2], [2, 3], [1, 3]], "action": [[2, 3, 1]]}));
    assert_eq!(out["quotient"]["counts"], json!([2, 2]));
}

#[test]
fn collapse_modes() {
    let sym = ok(&["collapse"], json!({"D": [{"c": 1, "e": 1}]}));
    assert_eq!(sym["limit"]["entries"], json!([[4]]));
    assert_eq!(sym["kind"], "collapsing");
    let t_to_zero = ok(&["collapse"], json!({"convention": "t_to_zero", "D": [{"c": 1, "e": -1}]}));
    assert_eq!(t_to_zero["limit"], sym["limit"]);
    let samples: Vec<Value> = [10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000]
        .iter()
        .map(|k| json!({"g": 1, "Y": [[k]]}))
        .collect();
    let num = ok(&["collapse", "--mode", "numeric"], json!({ "samples": samples }));
    let g = num["limit"]["entries"][0][0].as_f64().unwrap();
    assert!((g - 4.0).abs() < 1e-3);
    assert_eq!(num["report"]["top"].as_array().unwrap().len(), 10);
}

#[test]
fn fixed_limits() {
    let v = ok(&["volume-limit"], json!({"D": [2, {"c": 1, "e": 1}]}));
    assert_eq!(v["torus"]["entries"], json!([["1/2", 0], [0, 2]]));
    assert_eq!(v["euclidean_rank"], 1);
    let i = ok(&["injrad-limit"], json!({"a": [1], "r": 0}));
    assert_eq!(i["circle_circumferences"], json!([1]));
    assert_eq!(i["euclidean_rank"], 1);
}

#[test]
fn av_limit_with_oracle() {
    let out = ok(&["av-limit"], json!({"r": 2, "M": [[1, 0], [0, 2]], "t_samples": [1e-8]}));
    assert_eq!(out["limit"]["entries"], json!([["4/3", 0], [0, "8/3"]]));
    let oracle = &out["oracle"][0]["limit"]["entries"];
    assert!((oracle[1][1].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-9);
}

#[test]
fn reduce_round_trips() {
    let out = ok(&["reduce"], json!({"g": 1, "X": [["1/3"]], "Y": [["1/10"]]}));
    assert_eq!(out["in_siegel_set"], true);
    assert_eq!(out["point"]["Y"], json!([["10/9"]]));
    // The reduced point parses back and is already reduced.
    let again = ok(&["reduce"], out["point"].clone());
    assert_eq!(again["point"], out["point"]);
    assert_eq!(again["gamma"], json!([[1, 0], [0, 1]]));
}

#[test]
fn torus_output_parses_as_a_form() {
    let out = ok(&["av-limit"], json!({"M": [[2, 1], [1, 2]]}));
    let f: troplab_cli::json::FormIn = serde_json::from_value(out["limit"].clone()).unwrap();
    let q = f.form::<troplab::Rational>().unwrap();
    assert_eq!(troplab_cli::json::form_json(&q)["entries"], out["limit"]["entries"]);
    assert_eq!(q.gram()[(0, 1)], troplab::scalar::rat(3, 2));
}

#[test]
fn float_mode_is_accepted() {
    let out = ok(&["reduce"], json!({"g": 1, "X": [[0.2]], "Y": [[2.5]], "mode": "float"}));
    assert_eq!(out["point"]["mode"], "float");
    assert!((out["point"]["X"][0][0].as_f64().unwrap() - 0.2).abs() < 1e-12);
}

#[test]
fn collar_series_and_csv() {
    let path = std::env::temp_dir().join(format!("troplab-collar-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let out = ok(&["collar", "--emit-csv", p], json!({"c_star": 0.5, "decades": [4, 5, 6, 7, 8]}));
    let offsets: Vec<f64> = out["samples"].as_array().unwrap().iter().map(|s| s["offset"].as_f64().unwrap()).collect();
    let spread = offsets.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - offsets.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 0.2);
    let csv = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "abs_t,length,offset");
    assert_eq!(lines.len(), 6);
}

#[test]
fn tropicalize_direction() {
    let points: Vec<Value> = (1..=6)
        .map(|k| {
            let s = 10f64 * k as f64;
            json!([(-s).exp(), [0.0, (-2.0 * s).exp()]])
        })
        .collect();
    let out = ok(&["tropicalize"], json!({ "points": points }));
    let d = out["direction"].as_array().unwrap();
    assert!((d[0].as_f64().unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["av-limit"], r#"{"M": [[1, 2], [2, 1]]}"#);
    assert_eq!(code, 3);
    assert!(err.contains("positive definite"), "{err}");
    let (code, _, err) = run(&["av-limit"], r#"{"M": [[1, "x"], [0, 1]]}"#);
    assert_eq!(code, 2);
    assert!(err.contains("M[0][1]"), "{err}");
    let (code, _, _) = run(&["trop-jac"], "{not json");
    assert_eq!(code, 2);
    let (code, _, _) = run(&["trop-jac", "/nonexistent/graph.json"], "");
    assert_eq!(code, 1);
    let (code, _, err) = run(&["trop-jac"], r#"{"vertices": [{"id": 1}, {"id": 2}], "edges": [{"u": 1, "v": 2}]}"#);
    assert_eq!(code, 3, "{err}");
    let (code, _, _) = run(&["curve-limit"], r#"{"graph": {"vertices": [{"id": 1, "w": 2}]}, "multiplicities": []}"#);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["--tol", "0", "trop-jac"], "{}");
    assert_eq!(code, 2);
}

#[test]
fn output_is_deterministic() {
    let input = handcuff([1, 2, 3]).to_string();
    let a = run(&["torelli-check"], &input);
    let b = run(&["torelli-check"], &input);
    assert_eq!(a.1, b.1);
}
