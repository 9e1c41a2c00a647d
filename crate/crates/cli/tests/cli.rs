use std::process::{Command, Output};

use plma::json::{self, GraphFunctionJson, GraphJson, GraphMeasureJson, SolveReportJson, ToricMAJson};
use plma::potential_curve::{arc_masses, canonical_metric, green, GraphPoint};
use plma::rational::{format, rat};
use serde_json::Value;

const SQUARE: &str = r#"{"vertices": [["0", "0"], ["1", "0"], ["0", "1"], ["1", "1"]]}"#;
const SQUARE_SUPPORT: &str = r#"{"pieces": [
    {"slope": ["0", "0"], "intercept": "0"}, {"slope": ["1", "0"], "intercept": "0"},
    {"slope": ["0", "1"], "intercept": "0"}, {"slope": ["1", "1"], "intercept": "0"}]}"#;
const SIMPLEX: &str = r#"{"vertices": [["0", "0"], ["1", "0"], ["0", "1"]]}"#;
const CIRCLE: &str = r#"{"vertices": ["o"], "edges": [{"ends": [0, 0], "length": "1"}]}"#;
const OMEGA0: &str = r#"{"atoms": [{"point": {"vertex": 0}, "mass": "1"}]}"#;

fn plma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plma")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_object(out: &Output) -> Value {
    serde_json::from_slice::<Value>(&out.stderr).expect("error object on stderr")["error"].clone()
}

#[test]
fn toric_ma_of_square_support_function() {
    let out = plma(&["toric-ma", "--delta", SQUARE, "--g", SQUARE_SUPPORT]);
    assert!(out.status.success());
    let r: ToricMAJson = json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r.degree, "2");
    assert_eq!(r.ma_real.atoms.len(), 1);
    assert_eq!(r.ma_real.atoms[0].mass, "1");
    assert_eq!(r.ma_real.atoms[0].point, ["0", "0"]);
    assert_eq!(r.ma_berkovich.atoms[0].mass, "2");
}

#[test]
fn canonical_csv_matches_library() {
    let out = plma(&["curve-canonical", "--m", "2", "--iterations", "6", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("arc_start,arc_end,mass,mass_exact"));
    let expected = arc_masses(&canonical_metric(2, 6).unwrap().measure, 64).unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 64);
    for (row, mass) in rows.iter().zip(&expected) {
        assert_eq!(row[3], format(mass));
    }
    assert_eq!(rows[5][0], "0.078125");
}

#[test]
fn curve_green_round_trips() {
    let out = plma(&["curve-green", "--graph", CIRCLE, "--omega0", OMEGA0, "--x", r#"{"edge": 0, "offset": "1/2"}"#]);
    assert!(out.status.success());
    let graph = json::from_str::<GraphJson>(CIRCLE).unwrap().decode().unwrap();
    let f = json::from_str::<GraphFunctionJson>(&stdout(&out)).unwrap().decode(&graph).unwrap();
    let omega0 = json::from_str::<GraphMeasureJson>(OMEGA0).unwrap().decode(&graph).unwrap();
    let x = GraphPoint::Edge { edge: 0, offset: rat(1, 2) };
    assert_eq!(f, green(&graph, &x, &omega0).unwrap());
}

#[test]
fn toric_solve_accepts_both_normalizations() {
    let real = r#"{"atoms": [{"point": ["0"], "mass": "1/4"}, {"point": ["1"], "mass": "3/4"}]}"#;
    let a = plma(&["toric-solve", "--delta", r#"{"vertices": [["0"], ["1"]]}"#, "--mu", real]);
    assert!(a.status.success());
    let report: SolveReportJson = json::from_str(&stdout(&a)).unwrap();
    assert!(report.exact && report.converged);
    assert_eq!(report.max_residual, "0");

    let berkovich = r#"{"atoms": [{"point": ["0", "0"], "mass": "1/2"}, {"point": ["1", "0"], "mass": "1/2"}]}"#;
    let half = r#"{"atoms": [{"point": ["0", "0"], "mass": "1/4"}, {"point": ["1", "0"], "mass": "1/4"}]}"#;
    let b = plma(&["toric-solve", "--delta", SIMPLEX, "--mu", berkovich]);
    let c = plma(&["toric-solve", "--delta", SIMPLEX, "--mu", half]);
    assert!(b.status.success());
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn outputs_are_deterministic_and_can_go_to_a_file() {
    let mu = r#"{"atoms": [{"point": ["0", "0"], "mass": "1/6"}, {"point": ["1", "0"], "mass": "1/6"},
        {"point": ["0", "1"], "mass": "1/6"}]}"#;
    let first = plma(&["toric-solve", "--delta", SIMPLEX, "--mu", mu]);
    let second = plma(&["toric-solve", "--delta", SIMPLEX, "--mu", mu]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let dir = std::env::temp_dir().join(format!("plma-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let third = plma(&["toric-solve", "--delta", SIMPLEX, "--mu", mu, "--output", path.to_str().unwrap()]);
    assert!(third.status.success() && third.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn inputs_can_be_files() {
    let dir = std::env::temp_dir().join(format!("plma-cli-files-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let delta = dir.join("square.json");
    let g = dir.join("g.json");
    std::fs::write(&delta, SQUARE).unwrap();
    std::fs::write(&g, SQUARE_SUPPORT).unwrap();
    let out =
        plma(&["toric-energy", "--delta", delta.to_str().unwrap(), "--g", g.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "quantity,value,exact\nenergy,0,0\n");
    let missing = plma(&["toric-energy", "--delta", dir.join("none.json").to_str().unwrap(), "--g", SQUARE_SUPPORT]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_object(&missing)["kind"], "io");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn malformed_json_reports_position() {
    let out = plma(&["toric-ma", "--delta", "{\n  \"vertices\": [[\"0\"],\n}", "--g", SQUARE_SUPPORT]);
    assert_eq!(out.status.code(), Some(2));
    let e = error_object(&out);
    assert_eq!(e["kind"], "malformed_json");
    assert_eq!((e["line"].as_u64(), e["column"].as_u64()), (Some(3), Some(1)));
}

#[test]
fn validation_errors_exit_two() {
    let interval = r#"{"vertices": [["0"], ["1"]]}"#;
    let dim = plma(&["toric-ma", "--delta", interval, "--g", SQUARE_SUPPORT]);
    assert_eq!(dim.status.code(), Some(2));
    let mass = plma(&["toric-solve", "--delta", interval, "--mu", r#"{"atoms": [{"point": ["0"], "mass": "3"}]}"#]);
    assert_eq!(mass.status.code(), Some(2));
    assert_eq!(error_object(&mass)["kind"], "mass_mismatch");
    let g = r#"{"pieces": [{"slope": ["0", "0"], "intercept": "0"}]}"#;
    let adm = plma(&["toric-ma", "--delta", SQUARE, "--g", g]);
    assert_eq!(adm.status.code(), Some(2));
    assert_eq!(error_object(&adm)["kind"], "not_admissible");
    let usage = plma(&["envelope", "--delta", SQUARE, "--graph", CIRCLE, "--g", g]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_three() {
    let mu = r#"{"atoms": [{"point": ["0", "0"], "mass": "1/6"}, {"point": ["1", "0"], "mass": "1/6"},
        {"point": ["0", "1"], "mass": "1/6"}]}"#;
    let out = plma(&["toric-solve", "--delta", SIMPLEX, "--mu", mu, "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_object(&out)["kind"], "not_converged");
    let report: SolveReportJson = json::from_str(&stdout(&out)).unwrap();
    assert!(!report.converged);
}

#[test]
fn envelope_and_orthogonality_on_a_curve() {
    let psi = r#"{"edges": [[["0", "0"], ["1/2", "1"], ["1", "0"]]]}"#;
    let env = plma(&["envelope", "--graph", CIRCLE, "--omega0", OMEGA0, "--g", psi]);
    assert!(env.status.success());
    let graph = json::from_str::<GraphJson>(CIRCLE).unwrap().decode().unwrap();
    let p = json::from_str::<GraphFunctionJson>(&stdout(&env)).unwrap().decode(&graph).unwrap();
    // The tent is superharmonic away from 0, so the envelope is flat at its minimum.
    assert_eq!(p.edge_breakpoints(0), [(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(0, 1))]);
    let orth = plma(&["orthogonality", "--graph", CIRCLE, "--omega0", OMEGA0, "--g", psi]);
    let v: Value = serde_json::from_slice(&orth.stdout).unwrap();
    assert_eq!(v["defect"], "0");
}

#[test]
fn one_dimensional_envelope_plot() {
    let delta = r#"{"vertices": [["-1"], ["1"]]}"#;
    let psi = r#"{"terms": [
        {"coefficient": "1", "function": {"pieces": [{"slope": ["-1"], "intercept": "0"}, {"slope": ["1"], "intercept": "0"}]}},
        {"coefficient": "1", "function": {"pieces": [{"slope": ["-1"], "intercept": "1"}, {"slope": ["1"], "intercept": "-1"}]}},
        {"coefficient": "-1", "function": {"pieces": [{"slope": ["-1"], "intercept": "0"}, {"slope": ["1"], "intercept": "0"}]}}]}"#;
    let out = plma(&["envelope", "--delta", delta, "--g", psi, "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("v,psi,envelope\n"));
    assert!(text.lines().count() >= 65);
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[2] <= cols[1] + 1e-12);
    }
    let square = plma(&["envelope", "--delta", SQUARE, "--g", SQUARE_SUPPORT, "--format", "csv"]);
    assert_eq!(square.status.code(), Some(2));
}

#[test]
fn selftest_passes() {
    let out = plma(&["selftest"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
