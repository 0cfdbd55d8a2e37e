//! Small-`s` exponent classes for `M = 2`, large-`s` tail models, and tail
//! fits of `log E` against `r = 2 sqrt(s)`.

use alloc::vec::Vec;

use crate::kernels::HardEdgeParams;
use crate::linalg::{lstsq, Lu};
use crate::{Complex64, Error, Result};

type C = Complex64;

/// Leading coefficient of `log E` in `r`: `-9 * 2^{-11/3}`.
pub const LOGE_R_COEFF: f64 = -0.708_705_590_565_866_1;

#[derive(Debug, Clone, PartialEq)]
pub struct IndicialReport {
    pub params: HardEdgeParams,
    /// `±(nu_i - nu_j) + 1` over the three pairs.
    pub fixed: [f64; 6],
    /// The isolated exponent `0`.
    pub zero: f64,
    /// `1 ± 2 sqrt(Q/3)`
    pub pair_c: [f64; 2],
    /// `(3 ± sqrt(3) sqrt(4Q - 1)) / 6`, complex when `4Q < 1`.
    pub pair_d: [C; 2],
    pub q: f64,
    pub x_disc: f64,
    pub y_disc: f64,
    /// Roots of `27 C^6 + 54 x C^3 - 27 y`.
    pub fractional_c1: Vec<C>,
    /// Exponent and log power of the fractional class, recorded, not derived.
    pub delta1: f64,
    pub mu1: f64,
}

impl IndicialReport {
    /// Worst normalised polynomial residual over `fractional_c1`.
    pub fn c1_residual(&self) -> f64 {
        self.fractional_c1.iter().map(|&c| c1_residual(self.x_disc, self.y_disc, c)).fold(0.0, f64::max)
    }
}

pub fn c1_residual(x: f64, y: f64, c: C) -> f64 {
    let c3 = c * c * c;
    let t = [c3 * c3 * 27.0, c3 * (54.0 * x), C::new(-27.0 * y, 0.0)];
    let scale = t.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if scale == 0.0 {
        return 0.0;
    }
    (t[0] + t[1] + t[2]).norm() / scale
}

pub fn indicial_exponents(params: &HardEdgeParams) -> Result<IndicialReport> {
    if params.m != 2 {
        return Err(Error::Domain("indicial classes are tabulated for M = 2"));
    }
    let [n0, n1, n2] = [params.nu[0], params.nu[1], params.nu[2]];
    let fixed = [1.0 + (n0 - n1), 1.0 - (n0 - n1), 1.0 + (n0 - n2), 1.0 - (n0 - n2), 1.0 + (n1 - n2), 1.0 - (n1 - n2)];
    let q = n0 * n0 + n1 * n1 + n2 * n2 - n0 * n1 - n0 * n2 - n1 * n2;
    let rc = 2.0 * libm::sqrt(q) / libm::sqrt(3.0);
    let root = C::new(4.0 * q - 1.0, 0.0).sqrt() * libm::sqrt(3.0);
    let pair_d = [(C::new(3.0, 0.0) + root) / 6.0, (C::new(3.0, 0.0) - root) / 6.0];
    let x = (n0 + n1 - 2.0 * n2) * (2.0 * n0 - n1 - n2) * (n0 - 2.0 * n1 + n2);
    let f = |a: f64| 9.0 * a * a - 4.0;
    let y = f(n0 - n1) * f(n0 - n2) * f(n1 - n2) / 27.0;
    let disc = C::new(x * x + y, 0.0).sqrt();
    let mut roots = Vec::with_capacity(6);
    for t in [-x + disc, -x - disc] {
        let base = if t.norm() == 0.0 { C::new(0.0, 0.0) } else { t.powf(1.0 / 3.0) };
        for k in 0..3 {
            let w = C::from_polar(1.0, 2.0 * core::f64::consts::PI * k as f64 / 3.0);
            roots.push(base * w);
        }
    }
    Ok(IndicialReport {
        params: params.clone(),
        fixed,
        zero: 0.0,
        pair_c: [1.0 + rc, 1.0 - rc],
        pair_d,
        q,
        x_disc: x,
        y_disc: y,
        fractional_c1: roots,
        delta1: -2.0 / 3.0,
        mu1: -1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    /// `eta_0 ~ -3 2^{-4/3} s^{2/3}`
    Eta0Leading,
    /// `log E ~ -9 2^{-7/3} s^{2/3}`
    LogELeading,
    /// `log E ~ -9 2^{-7/3} s^{2/3} - 3 2^{-5/3} s^{1/3}`
    LogERefined,
}

pub fn tail_model(s: f64, which: TailModel) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain("tail model needs s > 0"));
    }
    let s13 = libm::cbrt(s);
    let s23 = s13 * s13;
    let lead = -9.0 * libm::pow(2.0, -7.0 / 3.0) * s23;
    Ok(match which {
        TailModel::Eta0Leading => -3.0 * libm::pow(2.0, -4.0 / 3.0) * s23,
        TailModel::LogELeading => lead,
        TailModel::LogERefined => lead - 3.0 * libm::pow(2.0, -5.0 / 3.0) * s13,
    })
}

/// Same models with `s = r^2 / 4`.
pub fn tail_model_r(r: f64, which: TailModel) -> Result<f64> {
    tail_model(r * r / 4.0, which)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMode {
    /// Exact solve on `(r - 1, r, r + 1)`, attributed to `center`.
    LocalTriple { center: f64 },
    /// Least squares on `{r^{4/3}, r^{2/3}, 1}` over all points.
    GlobalLsq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub window: Vec<f64>,
    /// Root-mean-square misfit over the window.
    pub residual: f64,
    pub a1_extrapolated: Option<f64>,
}

fn basis(r: f64) -> [f64; 3] {
    let r23 = libm::pow(r, 2.0 / 3.0);
    [r23 * r23, r23, 1.0]
}

fn lookup(points: &[(f64, f64)], r: f64) -> Option<f64> {
    points.iter().find(|p| (p.0 - r).abs() <= 1e-9 * r.abs().max(1.0)).map(|p| p.1)
}

fn triple(points: &[(f64, f64)], center: f64) -> Result<[f64; 3]> {
    let rs = [center - 1.0, center, center + 1.0];
    let mut a = Vec::with_capacity(9);
    let mut b = [0.0; 3];
    for (i, &r) in rs.iter().enumerate() {
        b[i] = lookup(points, r).ok_or(Error::Domain("local triple needs r - 1, r, r + 1"))?;
        if !(r > 0.0) {
            return Err(Error::Domain("r must be positive"));
        }
        a.extend_from_slice(&basis(r));
    }
    let lu = Lu::factor(3, a).map_err(|_| Error::Degenerate)?;
    let x = lu.solve(&b);
    Ok([x[0], x[1], x[2]])
}

/// `(r, a_1)` for every `r` whose neighbours `r ± 1` are present.
pub fn local_a1_column(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> =
        points.iter().filter_map(|&(r, _)| triple(points, r).ok().map(|c| (r, c[0]))).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `a_inf` from `a_1(r) = a_inf + k r^{-2/3}` over the largest five centres.
pub fn extrapolate_a1(column: &[(f64, f64)]) -> Result<f64> {
    if column.len() < 2 {
        return Err(Error::Degenerate);
    }
    let tail = &column[column.len().saturating_sub(5)..];
    let rows: Vec<Vec<f64>> = tail.iter().map(|&(r, _)| alloc::vec![1.0, libm::pow(r, -2.0 / 3.0)]).collect();
    let rhs: Vec<f64> = tail.iter().map(|p| p.1).collect();
    Ok(lstsq(2, &rows, &rhs)?[0])
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::Domain("tail fit needs at least three points"));
    }
    for (i, p) in points.iter().enumerate() {
        if !(p.0 > 0.0) || !p.1.is_finite() {
            return Err(Error::Domain("r must be positive and log E finite"));
        }
        if points[..i].iter().any(|q| q.0 == p.0) {
            return Err(Error::Domain("r values must be distinct"));
        }
    }
    Ok(())
}

pub fn fit_tail(points: &[(f64, f64)], mode: FitMode, extrapolate: bool) -> Result<TailFit> {
    check_points(points)?;
    let (coef, window) = match mode {
        FitMode::LocalTriple { center } => (triple(points, center)?, alloc::vec![center - 1.0, center, center + 1.0]),
        FitMode::GlobalLsq => {
            let rows: Vec<Vec<f64>> = points.iter().map(|p| basis(p.0).to_vec()).collect();
            let rhs: Vec<f64> = points.iter().map(|p| p.1).collect();
            let x = lstsq(3, &rows, &rhs)?;
            ([x[0], x[1], x[2]], points.iter().map(|p| p.0).collect())
        }
    };
    let mut ss = 0.0;
    for &r in &window {
        let v = lookup(points, r).unwrap_or(f64::NAN);
        let b = basis(r);
        let e = coef[0] * b[0] + coef[1] * b[1] + coef[2] - v;
        ss += e * e;
    }
    let a1_extrapolated = if extrapolate { Some(extrapolate_a1(&local_a1_column(points))?) } else { None };
    Ok(TailFit {
        a1: coef[0],
        b1: coef[1],
        c1: coef[2],
        residual: libm::sqrt(ss / window.len() as f64),
        window,
        a1_extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn special_set_classes() {
        let r = indicial_exponents(&HardEdgeParams::special()).unwrap();
        let mut f = r.fixed;
        f.sort_by(f64::total_cmp);
        assert_eq!(f, [0.5, 0.5, 1.0, 1.0, 1.5, 1.5]);
        assert_eq!(r.q, 0.25);
        let k = 1.0 / 3f64.sqrt();
        assert!((r.pair_c[0] - (1.0 + k)).abs() < 1e-15 && (r.pair_c[1] - (1.0 - k)).abs() < 1e-15);
        // 4Q - 1 = 0 collapses the d pair to 1/2
        assert_eq!(r.pair_d[0], C::new(0.5, 0.0));
        assert!(r.c1_residual() <= 1e-10);
    }

    #[test]
    fn m1_is_rejected() {
        assert!(indicial_exponents(&HardEdgeParams::m1(0.0).unwrap()).is_err());
    }

    #[test]
    fn y_factor_zero_gives_zero_root() {
        let p = HardEdgeParams::m2(2.0 / 3.0, 0.1).unwrap();
        let r = indicial_exponents(&p).unwrap();
        assert_eq!(r.y_disc, 0.0);
        assert!(r.fractional_c1.iter().any(|c| c.norm() == 0.0));
    }

    #[test]
    fn tail_values() {
        let v = tail_model(1.0, TailModel::Eta0Leading).unwrap();
        assert!((v + 1.190_550_788_976_149_7).abs() < 1e-12 && (v + 1.19055).abs() < 1e-5);
        let r = 7.0;
        let l = tail_model_r(r, TailModel::LogELeading).unwrap();
        assert!((l / libm::pow(r, 4.0 / 3.0) - LOGE_R_COEFF).abs() < 1e-14);
        assert!((LOGE_R_COEFF + 9.0 * 2f64.powf(-11.0 / 3.0)).abs() < 1e-16);
        assert!(tail_model(0.0, TailModel::LogELeading).is_err());
    }

    #[test]
    fn tail_derivative_matches_eta() {
        // s d/ds logE = eta_0 for the leading terms
        for s in [0.5, 3.0, 40.0] {
            let h = 1e-5 * s;
            let d = (tail_model(s + h, TailModel::LogELeading).unwrap()
                - tail_model(s - h, TailModel::LogELeading).unwrap())
                / (2.0 * h);
            let eta = tail_model(s, TailModel::Eta0Leading).unwrap();
            assert!((s * d - eta).abs() < 1e-8 * eta.abs());
        }
    }

    #[test]
    fn exact_model_recovery() {
        let pts: Vec<(f64, f64)> =
            (3..=15).map(|r| r as f64).map(|r| (r, -0.7 * r.powf(4.0 / 3.0) + 0.1 * r.powf(2.0 / 3.0) + 0.05)).collect();
        for mode in [FitMode::GlobalLsq, FitMode::LocalTriple { center: 9.0 }] {
            let f = fit_tail(&pts, mode, true).unwrap();
            assert!((f.a1 + 0.7).abs() < 1e-12 && (f.b1 - 0.1).abs() < 1e-12 && (f.c1 - 0.05).abs() < 1e-12);
            assert!((f.a1_extrapolated.unwrap() + 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_preconditions() {
        let pts = [(1.0, 0.0), (2.0, 0.0)];
        assert!(fit_tail(&pts, FitMode::GlobalLsq, false).is_err());
        let dup = [(1.0, 0.0), (2.0, 1.0), (2.0, 1.0)];
        assert!(fit_tail(&dup, FitMode::GlobalLsq, false).is_err());
        let pts = [(4.0, 1.0), (5.0, 2.0), (7.0, 3.0)];
        assert!(fit_tail(&pts, FitMode::LocalTriple { center: 5.0 }, false).is_err());
    }

    proptest! {
        #[test]
        fn c1_roots_solve_polynomial(n1 in -0.9f64..3.0, n2 in -0.9f64..3.0) {
            let p = HardEdgeParams::m2(n1, n2).unwrap();
            let r = indicial_exponents(&p).unwrap();
            prop_assert_eq!(r.fractional_c1.len(), 6);
            prop_assert!(r.c1_residual() <= 1e-10, "{}", r.c1_residual());
        }

        #[test]
        fn permutation_invariant(n1 in -0.9f64..3.0, n2 in -0.9f64..3.0) {
            let a = indicial_exponents(&HardEdgeParams::m2(n1, n2).unwrap()).unwrap();
            let b = indicial_exponents(&HardEdgeParams::m2(n2, n1).unwrap()).unwrap();
            let mut fa = a.fixed; fa.sort_by(f64::total_cmp);
            let mut fb = b.fixed; fb.sort_by(f64::total_cmp);
            for (x, y) in fa.iter().zip(&fb) { prop_assert!((x - y).abs() < 1e-14); }
            prop_assert!((a.q - b.q).abs() < 1e-14);
            prop_assert!((a.pair_c[0] - b.pair_c[0]).abs() < 1e-12);
            prop_assert!((a.x_disc.abs() - b.x_disc.abs()).abs() < 1e-12 * (1.0 + a.x_disc.abs()));
            prop_assert!((a.y_disc - b.y_disc).abs() < 1e-12 * (1.0 + a.y_disc.abs()));
        }
    }
}
