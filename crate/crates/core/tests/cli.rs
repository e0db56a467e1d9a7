//! End-to-end runs of the `arcsem` binary.

use std::path::Path;
use std::process::Command;

fn arcsem(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_arcsem"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&o.stdout).to_string() + &String::from_utf8_lossy(&o.stderr);
    (o.status.code().unwrap(), text)
}

fn meta(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("meta.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn expand_step_reports_nine_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = arcsem(&["expand", "--func", "step_pi3", "--grid", "uniform:10", "--b", "0"], dir.path());
    assert_eq!(code, 0, "{text}");
    assert_eq!(meta(dir.path())["significant"], 9);
    let (header, rows) = csv_rows(&dir.path().join("coefficients.csv"));
    assert_eq!(header, ["index", "block", "element", "value"]);
    assert!(!rows.is_empty());
    let (header, _) = csv_rows(&dir.path().join("decay.csv"));
    assert_eq!(header, ["degree", "max_abs"]);
}

#[test]
fn expand_constant_trig_in_hat_basis() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = arcsem(&["expand", "--trig", "a0=1", "--b", "-1", "--grid", "uniform:6"], dir.path());
    assert_eq!(code, 0, "{text}");
    let m = meta(dir.path());
    assert_eq!(m["elements"], 5);
    assert_eq!(m["significant"], 5);
}

#[test]
fn expand_fig5_decay_rate() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = arcsem(&["expand", "--func", "fig5", "--grid", "-3.14159265,0,3.14159265"], dir.path());
    assert_eq!(code, 0, "{text}");
    let rho = meta(dir.path())["rho"].as_f64().unwrap();
    assert!((1.50..=1.66).contains(&rho), "{rho}");
}

#[test]
fn unknown_function_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = arcsem(&["expand", "--func", "no_such_function"], dir.path());
    assert_eq!(code, 2);
    assert!(text.contains("unknown function"), "{text}");
}

#[test]
fn invalid_fields_are_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = arcsem(&["expand", "--func", "nope", "--b", "2", "--basis", "chebyshev"], dir.path());
    assert_eq!(code, 2);
    for needle in ["nope", "b must be", "chebyshev"] {
        assert!(text.contains(needle), "missing '{needle}' in {text}");
    }
}

#[test]
fn screened_poisson_residual_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["solve", "--problem", "screened_poisson", "--func", "exp_cos", "--trunc", "60", "--grid", "uniform:5"];
    let (code, text) = arcsem(&args, dir.path());
    assert_eq!(code, 0, "{text}");
    let (header, rows) = csv_rows(&dir.path().join("solution.csv"));
    assert_eq!(header, ["theta", "u", "du", "d2u", "residual"]);
    let worst = rows.iter().map(|r| r[4].abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst:e}");
    assert!(dir.path().join("drift.csv").exists());
}

#[test]
fn heat_drift_decays_in_arc_basis() {
    let dir = tempfile::tempdir().unwrap();
    let grid = "-3.141592653589793,-0.7903981633974483,-0.7803981633974483,0.7803981633974483,0.7903981633974483,3.141592653589793";
    let args = ["solve", "--problem", "heat", "--func", "heat_ic", "--trunc", "55", "--grid", grid, "--tspan", "0,1,11"];
    let (code, text) = arcsem(&args, dir.path());
    assert_eq!(code, 0, "{text}");
    let (_, rows) = csv_rows(&dir.path().join("drift.csv"));
    for r in rows.iter().filter(|r| r[0] == 1.0) {
        assert!(r[2] < 1e-10, "d={} drift {:e}", r[1], r[2]);
    }
}

#[test]
fn schrodinger_norm_is_conserved() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "solve", "--problem", "schrodinger", "--func", "schrodinger_ic", "--trunc", "60", "--grid", "uniform:4",
        "--tspan", "0,0.5,6",
    ];
    let (code, text) = arcsem(&args, dir.path());
    assert_eq!(code, 0, "{text}");
    let (header, rows) = csv_rows(&dir.path().join("norm.csv"));
    assert_eq!(header, ["t", "norm"]);
    let n0 = rows[0][1];
    for r in &rows {
        assert!(((r[1] - n0) / n0).abs() < 1e-9);
    }
    let (header, _) = csv_rows(&dir.path().join("solution.csv"));
    assert_eq!(header, ["theta", "re", "im", "abs"]);
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["solve", "--problem", "heat", "--func", "cos", "--trunc", "30", "--tspan", "0,0.5,3"];
    assert_eq!(arcsem(&args, a.path()).0, 0);
    assert_eq!(arcsem(&args, b.path()).0, 0);
    for f in ["solution.csv", "drift.csv", "norm.csv"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
    let m = meta(a.path());
    assert_eq!(m["config"]["trunc"], 30);
}

#[test]
fn bench_writes_table_and_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = arcsem(&["bench", "--sizes", "256,512,1024", "--repeats", "1"], dir.path());
    assert_eq!(code, 0, "{text}");
    let (header, rows) = csv_rows(&dir.path().join("bench.csv"));
    assert_eq!(header, ["n", "build_seconds", "solve_seconds"]);
    assert_eq!(rows.len(), 3);
    assert!(meta(dir.path())["solve_slope"].as_f64().unwrap().is_finite());
}
