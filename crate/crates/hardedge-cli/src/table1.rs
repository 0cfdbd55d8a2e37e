//! `log E^{(c,2)}(0; (0, r))` for `c = 0, 1` on integer `r`, with the local
//! `a_1` column and its extrapolation, graded against the published table.

use std::sync::OnceLock;

use hardedge::asymptotics::{extrapolate_a1, local_a1_column};
use hardedge::fredholm::mb_logdet;
use hardedge::kernels::MBParams;
use hardedge::quadrature::QuadratureKind;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::io::jnum;

pub const CS: [f64; 2] = [0.0, 1.0];
pub const THETA: f64 = 2.0;
pub const DEFAULT_NODES: usize = 48;
pub const MAX_NODES: usize = 96;

const REFERENCE_CSV: &str = include_str!("../data/table1_reference.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub r: f64,
    pub log_e: [Option<f64>; 2],
    pub a1: [Option<f64>; 2],
}

/// The embedded reference table; the `r = inf` row carries only `a1`.
pub fn reference() -> &'static [ReferenceRow] {
    static TABLE: OnceLock<Vec<ReferenceRow>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(REFERENCE_CSV.as_bytes());
        let num = |s: &str| if s.is_empty() { None } else { Some(s.parse::<f64>().expect("reference table")) };
        rd.records()
            .map(|rec| {
                let rec = rec.expect("reference table");
                ReferenceRow {
                    r: rec[0].parse().expect("reference table"),
                    log_e: [num(&rec[1]), num(&rec[3])],
                    a1: [num(&rec[2]), num(&rec[4])],
                }
            })
            .collect()
    })
}

pub fn reference_row(r: f64) -> Option<&'static ReferenceRow> {
    reference().iter().find(|row| row.r == r)
}

/// Absolute tolerance on `log E` against the reference at `r`.
pub fn cell_tolerance(r: f64) -> f64 {
    if r <= 8.0 {
        1e-7
    } else {
        1e-6
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub log_e: Option<f64>,
    /// `|log E(n) - log E(3n/2)|`
    pub est_error: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub r: f64,
    pub cells: [Cell; 2],
    pub a1: [Option<f64>; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1 {
    pub nodes: usize,
    pub rows: Vec<Row>,
    pub a_inf: [Option<f64>; 2],
}

fn cell(c: f64, r: f64, nodes: usize) -> Cell {
    let run = || -> hardedge::Result<(f64, f64)> {
        let mb = MBParams::new(c, THETA)?;
        let a = mb_logdet(&mb, r, nodes, QuadratureKind::GaussLegendre)?.logdet;
        let b = mb_logdet(&mb, r, nodes * 3 / 2, QuadratureKind::GaussLegendre)?.logdet;
        Ok((a, (a - b).abs()))
    };
    match run() {
        Ok((v, est)) if est <= cell_tolerance(r) => Cell { log_e: Some(v), est_error: est, error: None },
        Ok((v, est)) => Cell { log_e: Some(v), est_error: est, error: Some(format!("node refinement moved log E by {est:e}")) },
        Err(e) => Cell { log_e: None, est_error: f64::NAN, error: Some(e.to_string()) },
    }
}

/// Nodes may not exceed 64 so the refinement check stays within 96.
pub fn compute(nodes: usize, r_min: u32, r_max: u32) -> CliResult<Table1> {
    if !(4..=64).contains(&nodes) {
        return Err(CliError::Usage(format!("nodes must lie in [4, 64], got {nodes}")));
    }
    if r_min == 0 || r_min > r_max || r_max > 15 {
        return Err(CliError::Usage(format!("need 1 <= r_min <= r_max <= 15, got [{r_min}, {r_max}]")));
    }
    let rs: Vec<f64> = (r_min..=r_max).map(f64::from).collect();
    let jobs: Vec<(usize, f64)> = (0..2).flat_map(|ci| rs.iter().map(move |&r| (ci, r))).collect();
    let cells: Vec<Cell> = jobs.par_iter().map(|&(ci, r)| cell(CS[ci], r, nodes)).collect();
    let k = rs.len();
    let mut a1 = [vec![None; k], vec![None; k]];
    let mut a_inf = [None, None];
    for ci in 0..2 {
        let pts: Vec<(f64, f64)> = rs.iter().zip(&cells[ci * k..]).filter_map(|(&r, c)| c.log_e.map(|v| (r, v))).collect();
        let col = local_a1_column(&pts);
        for &(r, a) in &col {
            a1[ci][(r - rs[0]) as usize] = Some(a);
        }
        if col.len() >= 2 {
            a_inf[ci] = extrapolate_a1(&col).ok();
        }
    }
    let rows = rs
        .iter()
        .enumerate()
        .map(|(i, &r)| Row { r, cells: [cells[i].clone(), cells[k + i].clone()], a1: [a1[0][i], a1[1][i]] })
        .collect();
    Ok(Table1 { nodes, rows, a_inf })
}

impl Table1 {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        use crate::io::fmt_opt;
        self.rows
            .iter()
            .map(|row| {
                vec![
                    format!("{}", row.r),
                    fmt_opt(row.cells[0].log_e),
                    fmt_opt(row.a1[0]),
                    fmt_opt(row.cells[1].log_e),
                    fmt_opt(row.a1[1]),
                ]
            })
            .chain(self.a_inf.iter().any(Option::is_some).then(|| {
                vec!["inf".into(), String::new(), fmt_opt(self.a_inf[0]), String::new(), fmt_opt(self.a_inf[1])]
            }))
            .collect()
    }

    /// Cells that did not converge or missed the reference tolerance.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for row in &self.rows {
            for ci in 0..2 {
                let c = &row.cells[ci];
                if let Some(e) = &c.error {
                    out.push(format!("c={} r={}: {e}", CS[ci], row.r));
                }
                if let (Some(v), Some(refv)) = (c.log_e, reference_row(row.r).and_then(|x| x.log_e[ci])) {
                    let d = (v - refv).abs();
                    if d > cell_tolerance(row.r) {
                        out.push(format!("c={} r={}: |diff| = {d:e} > {:e}", CS[ci], row.r, cell_tolerance(row.r)));
                    }
                }
            }
        }
        out
    }

    pub fn summary(&self) -> Value {
        let mut cells = Vec::new();
        let mut max_diff = 0.0f64;
        for row in &self.rows {
            for ci in 0..2 {
                let c = &row.cells[ci];
                let rref = reference_row(row.r);
                let refv = rref.and_then(|x| x.log_e[ci]);
                let diff = match (c.log_e, refv) {
                    (Some(v), Some(w)) => Some(v - w),
                    _ => None,
                };
                if let Some(d) = diff {
                    max_diff = max_diff.max(d.abs());
                }
                let ref_a1 = rref.and_then(|x| x.a1[ci]);
                cells.push(json!({
                    "c": CS[ci],
                    "r": row.r,
                    "log_e": c.log_e.map(jnum),
                    "reference": refv,
                    "diff": diff.map(jnum),
                    "tolerance": cell_tolerance(row.r),
                    "est_error": jnum(c.est_error),
                    "a1": row.a1[ci].map(jnum),
                    "a1_reference": ref_a1,
                    "a1_diff": row.a1[ci].zip(ref_a1).map(|(a, b)| jnum(a - b)),
                    "error": c.error,
                }));
            }
        }
        let inf = reference_row(f64::INFINITY);
        let failures = self.failures();
        json!({
            "nodes": self.nodes,
            "refinement_nodes": self.nodes * 3 / 2,
            "theta": THETA,
            "cells": cells,
            "max_abs_diff": max_diff,
            "a_inf": (0..2).map(|ci| json!({
                "c": CS[ci],
                "extrapolated": self.a_inf[ci].map(jnum),
                "reference": inf.and_then(|x| x.a1[ci]),
                "predicted": hardedge::asymptotics::LOGE_R_COEFF,
            })).collect::<Vec<_>>(),
            "failures": failures,
            "pass": failures.is_empty(),
        })
    }
}
