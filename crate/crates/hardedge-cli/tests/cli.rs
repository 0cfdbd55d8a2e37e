use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardedge")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn table1_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = run(&["table1", "--out", out.to_str().unwrap(), "--r-min", "4", "--r-max", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("table1.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], ["r", "logE_c0", "a1_c0", "logE_c1", "a1_c1"]);
    assert_eq!(rows[1][0], "4");
    assert!(rows[1][2].is_empty() && rows[1][4].is_empty());
    let m: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "table1");
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn table1_default_cells_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = run(&["table1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out.join("table1.csv"));
    let cell = |r: &str, col: usize| -> f64 { rows.iter().find(|x| x[0] == r).unwrap()[col].parse().unwrap() };
    assert!((cell("9", 1) - -15.826846765594).abs() <= 1e-7);
    assert!((cell("5", 3) - -4.6175115857278).abs() <= 1e-7);
    assert!(rows.last().unwrap()[0] == "inf");
    let summary = stdout_json(&o);
    assert_eq!(summary["pass"], true);

    let csv = out.join("table1.csv");
    let f = run(&["fit", "--input", csv.to_str().unwrap(), "--y-col", "logE_c1", "--center", "13", "--extrapolate"]);
    assert_eq!(code(&f), 0, "{}", String::from_utf8_lossy(&f.stderr));
    let v = stdout_json(&f);
    assert!((v["a1"].as_f64().unwrap() - -0.7079460684).abs() < 2e-3);
    assert!((v["a1_extrapolated"].as_f64().unwrap().abs() - 0.708705590566).abs() < 5e-3);
    let g = run(&["fit", "--input", csv.to_str().unwrap(), "--mode", "global", "--csv"]);
    assert_eq!(code(&g), 0);
    assert!(String::from_utf8_lossy(&g.stdout).starts_with("a1,b1,c1,residual,a1_extrapolated\n"));
    assert_eq!(code(&run(&["fit", "--input", csv.to_str().unwrap(), "--mode", "cubic"])), 2);
}

#[test]
fn verify_cases() {
    let o = run(&["verify", "--case", "m1", "--s-max", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(stdout_json(&o)["pass"], true);

    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--case", "m2-special", "--s-max", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let gap = v["categories"].as_array().unwrap().iter().find(|c| c["name"] == "gap_vs_fredholm").unwrap();
    assert!(gap["max"].as_f64().unwrap() <= 1e-6);
    assert!(dir.path().join("report.json").exists());

    assert_eq!(code(&run(&["verify", "--case", "m3"])), 2);
    assert_eq!(code(&run(&["verify", "--case", "m1", "--tol", "1e-3"])), 2);
}

#[test]
fn mc_deterministic_and_within_three_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = |p: &Path| {
        vec![
            "mc".to_string(),
            "--m=1".into(),
            "--n0=50".into(),
            "--samples=10000".into(),
            "--seed=7".into(),
            format!("--out={}", p.display()),
        ]
    };
    let oa = Command::new(env!("CARGO_BIN_EXE_hardedge")).args(args(&a)).output().unwrap();
    assert_eq!(code(&oa), 0, "{}", String::from_utf8_lossy(&oa.stderr));
    let ob = Command::new(env!("CARGO_BIN_EXE_hardedge")).args(args(&b)).output().unwrap();
    assert_eq!(code(&ob), 0);
    let ca = fs::read(a.join("mc_gap.csv")).unwrap();
    assert_eq!(ca, fs::read(b.join("mc_gap.csv")).unwrap());
    let rows = csv_rows(&a.join("mc_gap.csv"));
    assert_eq!(rows[0], ["s", "p_hat", "ci_low", "ci_high", "oracle", "sigma_distance"]);
    for r in &rows[1..] {
        assert!(r[5].parse::<f64>().unwrap() <= 3.0, "{r:?}");
    }
}

#[test]
fn mc_validation_and_samples_file() {
    assert_eq!(code(&run(&["mc", "--samples", "0"])), 2);
    assert_eq!(code(&run(&["mc", "--n0", "1000"])), 2);
    assert_eq!(code(&run(&["mc", "--variance", "other"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "mc", "--m", "2", "--n0", "4", "--nu", "1,0", "--samples", "64", "--seed", "3", "--save-samples",
        "--variance", "unit_component", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::metadata(dir.path().join("lambda_min.bin")).unwrap().len(), 64 * 8);
    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("lambda_min.json")).unwrap()).unwrap();
    assert_eq!(side["variance"], "unit_component");
    assert_eq!(side["scaled"], true);
    let rows = csv_rows(&dir.path().join("mc_gap.csv"));
    assert_eq!(rows[0].len(), 4);
}

#[test]
fn gap_single_point() {
    let o = run(&["gap", "--c", "0", "--theta", "2", "--r", "9", "--tol", "1e-10"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!((v["log_e"].as_f64().unwrap() - -15.826846765594).abs() < 1e-7);
    let c = run(&["gap", "--c", "1", "--theta", "2", "--r", "5", "--nodes", "48", "--csv"]);
    let text = String::from_utf8_lossy(&c.stdout).to_string();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!((row[3].parse::<f64>().unwrap() - -4.6175115857278).abs() < 1e-7);
    assert_eq!(code(&run(&["gap", "--c", "-2", "--theta", "2", "--r", "4"])), 2);
}

#[test]
fn ode_export() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["ode", "--m", "2", "--s-max", "2", "--points", "10", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("trajectory.csv"));
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0].len(), 2 + 24 + 3);
    assert_eq!(rows[0][0], "s");
    let last: f64 = rows[11][0].parse().unwrap();
    assert_eq!(last, 2.0);
    assert!(rows[1..].iter().all(|r| r[26].parse::<f64>().unwrap() <= 1e-8));

    let o = run(&["ode", "--m", "1", "--nu1", "0.5", "--s-max", "1", "--points", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["ode", "--m", "3"])), 2);
}

#[test]
fn sigma_and_indicial() {
    let o = run(&["sigma", "--s", "0.5,2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 2);
    assert!(pts[1]["quartic"].as_f64().unwrap() <= 1e-6);
    assert!(pts[1]["third_order"].as_f64().unwrap() <= 1e-6);
    let c = run(&["sigma", "--m", "1", "--nu1", "0.7", "--s", "1", "--csv"]);
    assert!(String::from_utf8_lossy(&c.stdout).starts_with("s,p3_sigma\n"));

    let o = run(&["indicial", "--nu1", "-0.5", "--nu2", "0"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["c1_residual"].as_f64().unwrap() <= 1e-10);
    let o = run(&["indicial", "--csv"]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("class,re,im\n"));
}
