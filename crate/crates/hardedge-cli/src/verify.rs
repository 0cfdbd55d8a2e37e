//! Residual suites along a fixed grid, each category reduced to its worst
//! value and compared against a fixed tolerance.

use hardedge::flow::{first_integral_residuals, integrate, structural_residuals, FlowOptions, Trajectory};
use hardedge::fredholm::gap_probability_hardedge;
use hardedge::jet::{eta0_derivatives, eta_derivatives};
use hardedge::kernels::{build_kernel_bundle, HardEdgeParams};
use hardedge::sigma::{appendix_recover, p3_sigma_residual, quartic_ode_residual, radical_f, special_case_residuals};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::io::jnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// `M = 1`, `nu = (0, 0)`
    M1,
    /// `M = 2`, `nu = (0, -1/2, 0)`
    M2Special,
}

impl Case {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "m1" => Ok(Case::M1),
            "m2-special" => Ok(Case::M2Special),
            _ => Err(CliError::Usage(format!("unknown case {s:?}; expected m1 or m2-special"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::M1 => "m1",
            Case::M2Special => "m2-special",
        }
    }

    pub fn params(self) -> HardEdgeParams {
        match self {
            Case::M1 => HardEdgeParams::m1(0.0).expect("nu = 0 is valid"),
            Case::M2Special => HardEdgeParams::special(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Category {
    pub name: &'static str,
    pub tol: f64,
    pub max: f64,
    pub at_s: f64,
    /// Name of the worst individual residual.
    pub worst: String,
    pub count: usize,
}

impl Category {
    fn new(name: &'static str, tol: f64) -> Self {
        Self { name, tol, max: 0.0, at_s: f64::NAN, worst: String::new(), count: 0 }
    }

    fn record(&mut self, s: f64, what: &str, v: f64) {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        self.count += 1;
        if v > self.max || self.count == 1 {
            self.max = v;
            self.at_s = s;
            self.worst = what.to_string();
        }
    }

    fn fail(&mut self, s: f64, why: String) {
        self.count += 1;
        self.max = f64::INFINITY;
        self.at_s = s;
        self.worst = why;
    }

    pub fn pass(&self) -> bool {
        self.count > 0 && self.max <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub case: Case,
    pub s_max: f64,
    pub tol: f64,
    pub grid: Vec<f64>,
    pub gap_points: Vec<f64>,
    pub categories: Vec<Category>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.categories.iter().all(Category::pass)
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.categories.iter().filter(|c| !c.pass()).map(|c| c.name).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.name(),
            "s_max": self.s_max,
            "tol": self.tol,
            "grid": self.grid,
            "gap_points": self.gap_points,
            "categories": self.categories.iter().map(|c| json!({
                "name": c.name,
                "max": jnum(c.max),
                "tolerance": c.tol,
                "at_s": jnum(c.at_s),
                "worst": c.worst,
                "evaluations": c.count,
                "pass": c.pass(),
            })).collect::<Vec<_>>(),
            "failed": self.failed(),
            "pass": self.pass(),
        })
    }
}

/// Log-spaced grid from `1e-3` to `s_max`, 5 points per decade.
pub fn residual_grid(s_max: f64) -> Vec<f64> {
    let lo = -3.0f64;
    let hi = s_max.log10();
    let n = ((hi - lo) * 5.0).ceil().max(1.0) as usize;
    (0..=n).map(|k| if k == n { s_max } else { 10f64.powf(lo + (hi - lo) * k as f64 / n as f64) }).collect()
}

pub const GAP_POINTS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

fn categories(case: Case) -> Vec<Category> {
    let mut v = vec![Category::new("first_integrals", 1e-8), Category::new("schlesinger", 1e-8)];
    match case {
        Case::M1 => v.extend([
            Category::new("folding", 1e-10),
            Category::new("tracy_widom", 1e-8),
            Category::new("sigma_form", 1e-8),
        ]),
        Case::M2Special => v.extend([
            Category::new("radical_f", 1e-8),
            Category::new("quartic", 1e-6),
            Category::new("dual_path", 1e-9),
            Category::new("third_order", 1e-6),
            Category::new("f_identity", 1e-6),
            Category::new("appendix", 1e-6),
        ]),
    }
    v.push(Category::new("gap_vs_fredholm", 1e-6));
    v
}

fn cat<'a>(cs: &'a mut [Category], name: &str) -> &'a mut Category {
    cs.iter_mut().find(|c| c.name == name).expect("category exists")
}

fn structural(cs: &mut [Category], p: &HardEdgeParams, traj: &Trajectory) {
    for st in &traj.states {
        let s = st.s;
        for (name, v) in first_integral_residuals(p, st).iter() {
            cat(cs, "first_integrals").record(s, name, *v);
        }
        match structural_residuals(p, st) {
            Ok(r) => {
                for (name, v) in r.iter() {
                    let c = if name.starts_with("fold") {
                        "folding"
                    } else if name.starts_with("tw_") {
                        "tracy_widom"
                    } else {
                        "schlesinger"
                    };
                    cat(cs, c).record(s, name, *v);
                }
            }
            Err(e) => cat(cs, "schlesinger").fail(s, e.to_string()),
        }
    }
}

fn sigma_m1(cs: &mut [Category], p: &HardEdgeParams, traj: &Trajectory) {
    for st in &traj.states[1..] {
        let c = cat(cs, "sigma_form");
        match eta0_derivatives(st) {
            Ok(d) => c.record(st.s, "p3_sigma", p3_sigma_residual(st.s, d[0].re, d[1].re, d[2].re, p.ek(1), p.ek(2))),
            Err(e) => c.fail(st.s, e.to_string()),
        }
    }
}

fn sigma_m2(cs: &mut [Category], p: &HardEdgeParams, traj: &Trajectory) {
    for st in &traj.states[1..] {
        let s = st.s;
        let run = |cs: &mut [Category]| -> hardedge::Result<()> {
            let jet = eta_derivatives(p, st)?;
            let rf = radical_f(s, &jet.d, p, Some(st))?;
            cat(cs, "radical_f").record(s, "formula_vs_bilinear", rf.mismatch().unwrap_or(f64::NAN));
            let q = quartic_ode_residual(&jet)?;
            cat(cs, "quartic").record(s, "quartic", q.typeset);
            cat(cs, "dual_path").record(s, "typeset_vs_pipeline", q.agreement);
            let (third, fid) = special_case_residuals(&jet)?;
            cat(cs, "third_order").record(s, "third_order", third);
            cat(cs, "f_identity").record(s, "f_identity", fid);
            for (name, v) in appendix_recover(p, st)?.iter() {
                cat(cs, "appendix").record(s, name, *v);
            }
            Ok(())
        };
        if let Err(e) = run(cs) {
            for name in ["radical_f", "quartic", "dual_path", "third_order", "f_identity", "appendix"] {
                cat(cs, name).fail(s, e.to_string());
            }
        }
    }
}

fn gap(cs: &mut [Category], p: &HardEdgeParams, traj: &Trajectory, points: &[f64]) -> CliResult<()> {
    let bundle = build_kernel_bundle(p.clone())?;
    for &s in points {
        let c = cat(cs, "gap_vs_fredholm");
        let Some(i) = traj.states.iter().position(|st| st.s == s) else {
            c.fail(s, "point missing from trajectory".into());
            continue;
        };
        match gap_probability_hardedge(&bundle, s, 1e-10) {
            Ok(g) => c.record(s, "abs_diff_log_e", (traj.log_e[i] - g.log_e).abs()),
            Err(e) => c.fail(s, e.to_string()),
        }
    }
    Ok(())
}

/// Integrate the case's flow at tolerance `tol` and run every residual suite.
pub fn run(case: Case, s_max: f64, tol: f64) -> CliResult<VerifyReport> {
    if !(s_max > 1e-3 && s_max <= 10.0) {
        return Err(CliError::Usage(format!("s_max must lie in (1e-3, 10], got {s_max}")));
    }
    if !(1e-12..=1e-6).contains(&tol) {
        return Err(CliError::Usage(format!("tol must lie in [1e-12, 1e-6], got {tol}")));
    }
    let p = case.params();
    let grid = residual_grid(s_max);
    let gap_points: Vec<f64> = GAP_POINTS.iter().copied().filter(|&s| s <= s_max).collect();
    let mut targets: Vec<f64> = grid.iter().chain(&gap_points).copied().collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    let traj = integrate(&p, &targets, FlowOptions::new(tol))?;
    let mut cs = categories(case);
    structural(&mut cs, &p, &traj);
    match case {
        Case::M1 => sigma_m1(&mut cs, &p, &traj),
        Case::M2Special => sigma_m2(&mut cs, &p, &traj),
    }
    gap(&mut cs, &p, &traj, &gap_points)?;
    Ok(VerifyReport { case, s_max, tol, grid, gap_points, categories: cs })
}
