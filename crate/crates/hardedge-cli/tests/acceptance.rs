//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines print in order; exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use hardedge::asymptotics::{fit_tail, indicial_exponents, FitMode, LOGE_R_COEFF};
use hardedge::flow::{integrate, FlowOptions};
use hardedge::kernels::HardEdgeParams;
use hardedge_cli::cli::mc_oracle;
use hardedge_cli::mc::{binomial_se, empirical_gap, joint_sigma_distance, sample_min_singular_sq, McConfig};
use hardedge_cli::table1;
use hardedge_cli::verify::{self, Case, VerifyReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn table1_rows() -> (table1::Table1, Duration) {
    let t0 = Instant::now();
    let t = table1::compute(table1::DEFAULT_NODES, 4, 14).expect("table1 window is valid");
    (t, t0.elapsed())
}

fn criterion1(t: &table1::Table1, took: Duration) -> Outcome {
    let mut worst = [0.0f64; 2];
    let mut missing = Vec::new();
    for row in &t.rows {
        for ci in 0..2 {
            let refv = table1::reference_row(row.r).and_then(|r| r.log_e[ci]).expect("reference cell");
            match row.cells[ci].log_e {
                Some(v) => {
                    let band = usize::from(row.r > 8.0);
                    worst[band] = worst[band].max((v - refv).abs());
                }
                None => missing.push(format!("c={} r={}", ci, row.r)),
            }
        }
    }
    let nodes = t.nodes * 3 / 2;
    let pass = missing.is_empty() && worst[0] <= 1e-7 && worst[1] <= 1e-6 && nodes <= 96 && took.as_secs_f64() <= 120.0;
    outcome(
        pass,
        format!(
            "max |diff| r<=8 {:.2e} (tol 1e-7), r<=14 {:.2e} (tol 1e-6), nodes {}/{}, {:.1}s, missing {:?}",
            worst[0],
            worst[1],
            t.nodes,
            nodes,
            took.as_secs_f64(),
            missing
        ),
    )
}

fn criterion2(t: &table1::Table1) -> Outcome {
    let published = [-0.708_221_885_6, -0.707_946_068_4];
    let predicted = LOGE_R_COEFF.abs();
    let mut pass = true;
    let mut parts = Vec::new();
    for ci in 0..2 {
        let pts: Vec<(f64, f64)> = t.rows.iter().filter_map(|r| r.cells[ci].log_e.map(|v| (r.r, v))).collect();
        match fit_tail(&pts, FitMode::LocalTriple { center: 13.0 }, true) {
            Ok(f) => {
                let a_inf = f.a1_extrapolated.unwrap_or(f64::NAN);
                let d1 = (f.a1 - published[ci]).abs();
                let d2 = (a_inf.abs() - predicted).abs();
                pass &= d1 <= 2e-3 && d2 <= 5e-3;
                parts.push(format!("c={ci}: a1(13) {:.10} |diff| {d1:.1e} (tol 2e-3), a_inf {a_inf:.6} |diff| {d2:.1e} (tol 5e-3)", f.a1));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("c={ci}: {e}"));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn criterion3(m2: &VerifyReport) -> Outcome {
    let c = m2.category("gap_vs_fredholm").expect("category");
    let want = [0.25, 0.5, 1.0, 2.0, 4.0];
    let pass = c.pass() && m2.gap_points == want && c.max <= 1e-6;
    outcome(pass, format!("max |dlogE| {:.2e} at s={} over {:?} (tol 1e-6)", c.max, c.at_s, m2.gap_points))
}

fn check(rep: &VerifyReport, name: &str, tol: f64, pass: &mut bool, parts: &mut Vec<String>) {
    let c = rep.category(name).expect("category");
    let ok = c.count > 0 && c.max <= tol;
    *pass &= ok;
    parts.push(format!("{}:{name} {:.1e}/{tol:.0e}{}", rep.case.name(), c.max, if ok { "" } else { " FAIL" }));
}

fn criterion4(m1: &VerifyReport, m2: &VerifyReport) -> Outcome {
    let (mut pass, mut parts) = (true, Vec::new());
    for rep in [m1, m2] {
        pass &= rep.tol == 1e-10 && rep.s_max == 10.0;
        check(rep, "first_integrals", 1e-8, &mut pass, &mut parts);
    }
    parts.push("s in [1e-4, 10], tol 1e-10".into());
    outcome(pass, parts.join(", "))
}

fn criterion5(m1: &VerifyReport, m2: &VerifyReport) -> Outcome {
    let (mut pass, mut parts) = (true, Vec::new());
    check(m1, "sigma_form", 1e-8, &mut pass, &mut parts);
    check(m2, "quartic", 1e-6, &mut pass, &mut parts);
    check(m2, "dual_path", 1e-9, &mut pass, &mut parts);
    check(m2, "third_order", 1e-6, &mut pass, &mut parts);
    check(m2, "f_identity", 1e-6, &mut pass, &mut parts);
    outcome(pass, parts.join(", "))
}

fn criterion6(m1: &VerifyReport, m2: &VerifyReport) -> Outcome {
    let (mut pass, mut parts) = (true, Vec::new());
    check(m1, "folding", 1e-10, &mut pass, &mut parts);
    check(m1, "tracy_widom", 1e-8, &mut pass, &mut parts);
    check(m1, "schlesinger", 1e-8, &mut pass, &mut parts);
    check(m2, "schlesinger", 1e-8, &mut pass, &mut parts);
    check(m2, "appendix", 1e-6, &mut pass, &mut parts);
    outcome(pass, parts.join(", "))
}

fn criterion7() -> Outcome {
    let pi = std::f64::consts::PI;
    let s = 1e-3f64;
    let series = -2.0 * (s / pi).sqrt() - 2.0 * (4.0 - pi) * s / pi
        - 32.0 / 3.0 * (3.0 - pi) * s.powf(1.5) / pi.powf(1.5)
        - 16.0 / 9.0 * (72.0 - 32.0 * pi + 3.0 * pi * pi) * s * s / (pi * pi)
        - 64.0 / 45.0 * (360.0 - 200.0 * pi + 27.0 * pi * pi) * s.powf(2.5) / pi.powf(2.5)
        - 512.0 / 675.0 * (2700.0 - 1800.0 * pi + 347.0 * pi * pi - 15.0 * pi.powi(3)) * s.powi(3) / pi.powi(3);
    match integrate(&HardEdgeParams::special(), &[s], FlowOptions::new(1e-12)) {
        Ok(t) => {
            let d = (t.states[1].eta[0].re - series).abs();
            let tol = 5.0 * s.powf(3.5);
            outcome(d <= tol, format!("|eta0 - series| {d:.2e} at s=1e-3 (tol 5 s^3.5 = {tol:.2e})"))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion8() -> Outcome {
    let t0 = Instant::now();
    let grid = [0.5, 1.0, 2.0];
    let samples = 10_000;
    let run = || -> Result<(f64, f64, Vec<String>), Box<dyn std::error::Error>> {
        let mut parts = Vec::new();
        let m1 = sample_min_singular_sq(&McConfig::new(1, 50, vec![0], samples, 7))?;
        let mut worst1 = 0.0f64;
        for row in empirical_gap(&m1, &grid, 50)? {
            let e = mc_oracle(1, 0, row.s)?.expect("M = 1 oracle");
            let d = (row.p_hat - e).abs() / binomial_se(e, samples);
            worst1 = worst1.max(d);
            parts.push(format!("M=1 s={}: {:.4} vs {:.4} ({d:.2}σ)", row.s, row.p_hat, e));
        }
        let a = sample_min_singular_sq(&McConfig::new(2, 40, vec![0, 0], samples, 11))?;
        let b = sample_min_singular_sq(&McConfig::new(2, 80, vec![0, 0], samples, 12))?;
        let (ga, gb) = (empirical_gap(&a, &grid, 40)?, empirical_gap(&b, &grid, 80)?);
        let mut worst2 = 0.0f64;
        for (x, y) in ga.iter().zip(&gb) {
            let d = joint_sigma_distance(x.p_hat, samples, y.p_hat, samples);
            worst2 = worst2.max(d);
            parts.push(format!("M=2 s={}: {:.4} vs {:.4} ({d:.2}σ)", x.s, x.p_hat, y.p_hat));
        }
        Ok((worst1, worst2, parts))
    };
    match run() {
        Ok((w1, w2, mut parts)) => {
            let took = t0.elapsed().as_secs_f64();
            parts.push(format!("{took:.1}s (limit 300s)"));
            outcome(w1 <= 3.0 && w2 <= 3.0 && took <= 300.0, parts.join(", "))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion9() -> Outcome {
    let r = match indicial_exponents(&HardEdgeParams::special()) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut b: Vec<f64> = r.fixed.to_vec();
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let b_ok = b.len() == 3 && [0.5, 1.0, 1.5].iter().zip(&b).all(|(w, g)| (w - g).abs() < 1e-12);
    let k = 1.0 / 3f64.sqrt();
    let mut c = r.pair_c.to_vec();
    c.sort_by(f64::total_cmp);
    let c_ok = (c[0] - (1.0 - k)).abs() < 1e-12 && (c[1] - (1.0 + k)).abs() < 1e-12;
    let res = r.c1_residual();
    let roots_ok = !r.fractional_c1.is_empty() && res <= 1e-10;
    outcome(
        b_ok && c_ok && roots_ok,
        format!("fixed {b:?}, pair {c:?}, {} C1 roots with residual {res:.1e} (tol 1e-10)", r.fractional_c1.len()),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let (t, took) = table1_rows();
    results.push((1, "reference table reproduction", criterion1(&t, took)));
    results.push((2, "tail coefficient", criterion2(&t)));
    let m1 = verify::run(Case::M1, 10.0, 1e-10);
    let m2 = verify::run(Case::M2Special, 10.0, 1e-10);
    match (&m1, &m2) {
        (Ok(m1), Ok(m2)) => {
            results.push((3, "three-way consistency", criterion3(m2)));
            results.push((4, "conservation", criterion4(m1, m2)));
            results.push((5, "sigma-form residuals", criterion5(m1, m2)));
            results.push((6, "structure", criterion6(m1, m2)));
        }
        _ => {
            let why = format!("{:?} / {:?}", m1.as_ref().err(), m2.as_ref().err());
            for (n, name) in [(3, "three-way consistency"), (4, "conservation"), (5, "sigma-form residuals"), (6, "structure")] {
                results.push((n, name, outcome(false, why.clone())));
            }
        }
    }
    results.push((7, "small-s series", criterion7()));
    results.push((8, "Monte Carlo", criterion8()));
    results.push((9, "indicial classification", criterion9()));
    let mut failed = 0;
    for (n, name, o) in &results {
        println!("criterion {n} ({name}): {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {}/{} passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
