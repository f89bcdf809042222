use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transversal")).args(args).env_remove("TRANSVERSAL_THREADS").output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const TRIANGLE: &str = r#"{"dim": 2, "atoms": [
  {"x": ["0", "0"], "w": "1/3"}, {"x": ["1", "0"], "w": "1/3"}, {"x": ["0", "1"], "w": "1/3"}]}"#;

#[test]
fn bounds_rows() {
    let r = json_ok(&["bounds", "--m", "1", "--n", "2"]);
    assert_eq!(r["result"]["n_min"], 3);
    assert_eq!(r["result"]["rado"], "1/3");
    assert_eq!(r["result"]["improved"], "28/81");
    assert_eq!(r["manifest"]["subcommand"], "bounds");
    assert!(r["manifest"]["timing"].is_null());
    assert_eq!(json_ok(&["bounds", "--m", "1", "--n", "3"])["result"]["n_min"], 5);
    assert_eq!(json_ok(&["bounds", "--m", "2", "--n", "2"])["result"]["n_min"], 5);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&["bounds", "--m", "1", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--m", "0", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "--family", "no-such-family"]).status.code(), Some(2));
    assert_eq!(run(&["depth", "--input", "/nonexistent/cloud.json"]).status.code(), Some(2));
}

#[test]
fn schubert_support_and_zero_class() {
    let r = json_ok(&["schubert", "--n", "2", "--codim", "5", "--exponents", "2,3"]);
    assert_eq!(r["result"]["product"]["support"], serde_json::json!([[3, 5], [4, 4]]));
    assert_eq!(r["result"]["nonvanishing"], true);
    let r = json_ok(&["schubert", "--n", "2", "--codim", "5", "--exponents", "0,6"]);
    assert_eq!(r["result"]["nonvanishing"], false);
    assert_eq!(r["result"]["product"]["support"], serde_json::json!([]));
}

#[test]
fn schubert_checks_and_exit_codes() {
    let r = json_ok(&["schubert", "--check", "whitney", "--n", "3", "--codim", "4"]);
    assert_eq!(r["result"]["passed"], true);
    assert_eq!(r["manifest"]["config"]["check"], "whitney");
    json_ok(&["schubert", "--check", "main-obstruction", "--m", "2", "--n", "2"]);
    json_ok(&["schubert", "--check", "heights", "--n", "2", "--codim", "3"]);
    json_ok(&["schubert", "--check", "power2free", "--m", "1", "--n", "2"]);
    // The exit code follows the reported verdict.
    let out = run(&["schubert", "--check", "power2free", "--m", "2", "--n", "3"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let passed = report["result"]["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 1 }));
    assert_eq!(run(&["schubert", "--check", "whitney", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        json_ok(&["gen", "--family", "uniform-ball", "--seed", "11", "--count", "3", "--out-dir", d.to_str().unwrap()]);
    }
    for seed in 11..14 {
        let name = format!("uniform-ball-{seed}.json");
        let x = std::fs::read(a.join(&name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(&name)).unwrap());
    }
    let one = run(&["gen", "--family", "gaussian-quantized", "--seed", "3"]);
    let two = run(&["gen", "--family", "gaussian-quantized", "--seed", "3"]);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn gen_simplex_atoms_is_the_triangle() {
    let r = json_ok(&["gen", "--family", "simplex-atoms"]);
    let expected: Value = serde_json::from_str(TRIANGLE).unwrap();
    assert_eq!(r["result"]["instances"][0], expected);
}

#[test]
fn depth_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.json", TRIANGLE);
    let r = json_ok(&["depth", "--input", &input, "--point", "1/3,1/3", "--region", "1/3"]);
    assert_eq!(r["result"]["point_depth"]["value"], "1/3");
    assert_eq!(r["result"]["depth_of_measure"]["value"], "1/3");
    assert_eq!(r["result"]["region"]["vertices"], serde_json::json!([["0", "0"], ["1", "0"], ["0", "1"]]));
    assert_eq!(r["manifest"]["inputs"][0], input);
}

#[test]
fn tabular_input_and_tsv_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.csv", "x1,x2,weight\n0,0,1\n1,0,1\n0,1,1\n");
    let out = run(&["--format", "tsv", "depth", "--input", &input, "--region", "1/3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# manifest {"));
    assert_eq!(&lines[1..], &["x1\tx2", "0\t0", "1\t0", "0\t1"]);

    let out = run(&["--format", "tsv", "depth", "--input", &input, "--point", "1/3,1/3", "--profile", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let masses: Vec<&str> = text.lines().skip(2).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(masses, vec!["1/3", "1/3", "2/3", "2/3"]);
}

#[test]
fn center_of_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.json", TRIANGLE);
    let r = json_ok(&["center", "--input", &input]);
    assert_eq!(r["result"]["c"], serde_json::json!(["1/3", "1/3"]));
    assert_eq!(r["result"]["classification"], "insufficient");
    assert_eq!(r["result"]["threshold"], "28/81");
}

#[test]
fn simplex_symmetric_fixture() {
    let r = json_ok(&["simplex", "--vertices", "1,0;0,1;-1,-1"]);
    let p = &r["result"]["placement"];
    let delta: Vec<Vec<f64>> = serde_json::from_value(p["delta_vertices"].clone()).unwrap();
    let rmat: Vec<Vec<f64>> = serde_json::from_value(p["factor_r"].clone()).unwrap();
    let dist = |a: &[f64], b: &[f64]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    for i in 0..3 {
        for j in i + 1..3 {
            assert!((dist(&delta[i], &delta[j]) - 1.0).abs() < 1e-9);
        }
    }
    // The tuple is fixed by swapping the coordinates, so the placed simplex is too.
    for v in &delta {
        assert!(delta.iter().any(|w| (w[0] - v[1]).abs() < 1e-9 && (w[1] - v[0]).abs() < 1e-9));
    }
    // The vertex opposite the mirror line sits on the diagonal through (-1,-1).
    assert!(delta.iter().any(|v| (v[0] - v[1]).abs() < 1e-9 && v[0] < 0.0));
    let rrt00 = rmat[0][0] * rmat[0][0] + rmat[0][1] * rmat[0][1];
    let rrt01 = rmat[0][0] * rmat[1][0] + rmat[0][1] * rmat[1][1];
    assert!((rrt00 - 1.0).abs() < 1e-9 && rrt01.abs() < 1e-9);
    assert_eq!(r["result"]["surrogate"], false);
}

#[test]
fn simplex_surrogate_requires_insufficient_depth() {
    let dir = tempfile::tempdir().unwrap();
    let hexagon = r#"{"dim": 2, "atoms": [
      {"x": ["2", "0"], "w": "1/6"}, {"x": ["1", "2"], "w": "1/6"}, {"x": ["-1", "2"], "w": "1/6"},
      {"x": ["-2", "0"], "w": "1/6"}, {"x": ["-1", "-2"], "w": "1/6"}, {"x": ["1", "-2"], "w": "1/6"}]}"#;
    let input = write(dir.path(), "hex.json", hexagon);
    assert_eq!(run(&["simplex", "--input", &input]).status.code(), Some(2));
    let r = json_ok(&["simplex", "--input", &input, "--force"]);
    assert_eq!(r["result"]["surrogate"], true);
    let tri = write(dir.path(), "tri.json", TRIANGLE);
    json_ok(&["simplex", "--input", &tri]);
}

#[test]
fn transversal_search_verify_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    json_ok(&["gen", "--family", "gaussian-quantized", "--dim", "3", "--atoms", "15", "--weight-max", "4", "--seed", "2", "--out-dir", d]);
    let input = dir.path().join("gaussian-quantized-2.json");
    let input = input.to_str().unwrap();
    let r = json_ok(&["transversal", "--input", input, "--n", "2", "--seed", "9"]);
    assert_eq!(r["result"]["success"], true);
    assert_eq!(r["manifest"]["seed"], 9);
    assert_eq!(r["result"]["target"], "28/81");

    // Verifying the frame just found reproduces the objective exactly.
    let frame = write(dir.path(), "frame.json", &r["result"]["frame"].to_string());
    let v = json_ok(&["transversal", "--input", input, "--frame", &frame]);
    assert_eq!(v["result"]["objective"], r["result"]["objective"]);
    assert_eq!(v["result"]["per_measure_depths"], r["result"]["per_measure_depths"]);

    let unreachable = run(&["transversal", "--input", input, "--frame", &frame, "--target", "1"]);
    assert_eq!(unreachable.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&unreachable.stdout).unwrap();
    assert_eq!(report["result"]["success"], false);
}

#[test]
fn transversal_reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    json_ok(&["gen", "--family", "uniform-ball", "--dim", "3", "--atoms", "12", "--seed", "4", "--out-dir", d]);
    let input = dir.path().join("uniform-ball-4.json");
    let input = input.to_str().unwrap();
    let one = run(&["--threads", "1", "transversal", "--input", input, "--restarts", "20", "--local-steps", "50"]);
    let four = run(&["--threads", "4", "transversal", "--input", input, "--restarts", "20", "--local-steps", "50"]);
    assert_eq!(one.status.code(), four.status.code());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.json");
    let out = run(&["--output", path.to_str().unwrap(), "bounds", "--m", "2", "--n", "3"]);
    assert!(out.status.success() && out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["result"]["n_min"], 8);
    assert_eq!(r["result"]["improved"], "49/192");
}
