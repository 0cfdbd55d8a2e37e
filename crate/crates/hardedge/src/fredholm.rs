//! Nyström evaluation of `det(1 - K)` on `(0, s)` and gap probabilities.

use alloc::vec;
use alloc::vec::Vec;

use crate::kernels::{borodin_kernel_matrix, KernelBundle, MBParams};
use crate::linalg::Lu;
use crate::quadrature::{make_rule, QuadratureKind, QuadratureRule};
use crate::{Error, Result};

/// Largest MB interval accepted; beyond it `E` underflows the useful range.
pub const MAX_R: f64 = 15.0;

const START_NODES: usize = 16;
const MAX_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FredholmDet {
    pub det: f64,
    pub logdet: f64,
    pub sign: f64,
}

/// `det(I - D)` with `D_ij = sqrt(w_i w_j) K(x_i, x_j)`.
pub fn fredholm_det(kernel: impl Fn(f64, f64) -> f64, rule: &QuadratureRule) -> Result<FredholmDet> {
    let n = rule.n;
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] = kernel(rule.nodes[i], rule.nodes[j]);
        }
    }
    det_from_matrix(&k, &rule.weights)
}

/// Same as [`fredholm_det`] for a pre-assembled row-major kernel matrix.
pub fn det_from_matrix(k: &[f64], weights: &[f64]) -> Result<FredholmDet> {
    let n = weights.len();
    let sq: Vec<f64> = weights.iter().map(|w| libm::sqrt(*w)).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = sq[i] * sq[j] * k[i * n + j];
            if !d.is_finite() {
                return Err(Error::Domain("kernel not finite on the node grid"));
            }
            a[i * n + j] = if i == j { 1.0 - d } else { -d };
        }
    }
    let lu = Lu::factor(n, a)?;
    let (sign, logdet) = lu.log_det();
    Ok(FredholmDet { det: sign * libm::exp(logdet), logdet, sign })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Abscissa {
    S,
    /// `r = 2 sqrt(s)`, the MB variable.
    R,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint {
    pub abscissa: f64,
    pub e: f64,
    pub log_e: f64,
    pub nodes: usize,
    pub est_error: f64,
}

impl GapPoint {
    fn from_log(abscissa: f64, log_e: f64, nodes: usize, est_error: f64) -> Self {
        Self { abscissa, e: libm::exp(log_e), log_e, nodes, est_error }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapCurve {
    pub kind: Abscissa,
    pub points: Vec<GapPoint>,
}

impl GapCurve {
    pub fn new(kind: Abscissa) -> Self {
        Self { kind, points: Vec::new() }
    }

    /// Check `0 < E <= 1`, `log E = ln E`, increasing abscissas and
    /// non-increasing `E` (up to `slack` in `log E`).
    pub fn validate(&self, slack: f64) -> Result<()> {
        for p in &self.points {
            if !(p.e > 0.0 && p.log_e <= slack) {
                return Err(Error::Domain("gap probability outside (0, 1]"));
            }
            if (libm::log(p.e) - p.log_e).abs() > 1e-14 * p.log_e.abs().max(1.0) {
                return Err(Error::Domain("log E inconsistent with E"));
            }
        }
        for w in self.points.windows(2) {
            if !(w[1].abscissa > w[0].abscissa) {
                return Err(Error::Domain("abscissas not strictly increasing"));
            }
            if w[1].log_e > w[0].log_e + slack {
                return Err(Error::Domain("gap probability increased"));
            }
        }
        Ok(())
    }
}

/// `log det(1 - K^{(c,theta)})` on `(0, r)` with a fixed `n`-point rule.
pub fn mb_logdet(mb: &MBParams, r: f64, n: usize, kind: QuadratureKind) -> Result<FredholmDet> {
    if !(r > 0.0) {
        return Err(Error::Domain("r must be positive"));
    }
    if r > MAX_R {
        return Err(Error::Domain("r > 15 refused: E underflows the reliable range"));
    }
    let rule = make_rule(kind, n, 0.0, r)?;
    let k = borodin_kernel_matrix(mb, &rule.nodes)?;
    det_from_matrix(&k, &rule.weights)
}

/// Doubles `n` from 16 until successive `log E` agree to `target_tol`.
pub fn gap_probability_mb(mb: &MBParams, r: f64, target_tol: f64) -> Result<GapPoint> {
    gap_probability_mb_with(mb, r, target_tol, QuadratureKind::GaussLegendre)
}

pub fn gap_probability_mb_with(
    mb: &MBParams,
    r: f64,
    target_tol: f64,
    kind: QuadratureKind,
) -> Result<GapPoint> {
    doubling(r, target_tol, |n| mb_logdet(mb, r, n, kind).map(|d| d.logdet))
}

fn doubling(abscissa: f64, tol: f64, mut f: impl FnMut(usize) -> Result<f64>) -> Result<GapPoint> {
    let mut n = START_NODES;
    let mut prev = f(n)?;
    while n < MAX_NODES {
        n *= 2;
        let cur = f(n)?;
        let d = (cur - prev).abs();
        if d < tol {
            return Ok(GapPoint::from_log(abscissa, cur, n, d));
        }
        prev = cur;
    }
    Err(Error::NonConvergence { what: "Nyström node doubling", terms: n })
}

/// How an `M = 2` hard-edge determinant is discretised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HardEdgeRoute {
    /// Map to the MB kernel on `(0, 2 sqrt(s))`; needs `nu = ((c+1)/2 - 1, (c+2)/2 - 1)`.
    MbIdentity,
    /// `x = s t^2` on `t in (0, 1)`, which removes the `x^{nu_1}` endpoint behaviour.
    SqrtSubstitution,
    /// Raw variable with Gauss–Jacobi weight `x^{min nu}`.
    GaussJacobi,
}

/// The MB parameters matching a hard-edge set, if `nu_2 = nu_1 + 1/2`.
pub fn mb_for_params(bundle: &KernelBundle) -> Option<MBParams> {
    let p = &bundle.params;
    if p.m != 2 || (p.nu[2] - p.nu[1] - 0.5).abs() > 1e-15 {
        return None;
    }
    MBParams::new(2.0 * p.nu[1] + 1.0, 2.0).ok()
}

/// `log det(1 - K_M)` on `(0, s)` with `n` nodes along the chosen route.
pub fn hardedge_logdet(bundle: &KernelBundle, s: f64, n: usize, route: HardEdgeRoute) -> Result<FredholmDet> {
    if !(s > 0.0) {
        return Err(Error::Domain("s must be positive"));
    }
    match route {
        HardEdgeRoute::MbIdentity => {
            let mb = mb_for_params(bundle).ok_or(Error::Domain("parameters have no MB counterpart"))?;
            mb_logdet(&mb, 2.0 * libm::sqrt(s), n, QuadratureKind::GaussLegendre)
        }
        HardEdgeRoute::SqrtSubstitution => {
            let (x, w) = sqrt_nodes(s, n)?;
            let k = bundle.kernel_matrix(&x)?;
            det_from_matrix(&k, &w)
        }
        HardEdgeRoute::GaussJacobi => {
            let beta = bundle.params.nu[1..].iter().cloned().fold(f64::INFINITY, f64::min);
            if beta == 0.0 {
                let rule = make_rule(QuadratureKind::GaussLegendre, n, 0.0, s)?;
                return det_from_matrix(&bundle.kernel_matrix(&rule.nodes)?, &rule.weights);
            }
            let rule = make_rule(QuadratureKind::GaussJacobi { beta }, n, 0.0, s)?;
            let mut k = bundle.kernel_matrix(&rule.nodes)?;
            // the weight x^beta is already inside w_j; strip it from column j
            for i in 0..n {
                for j in 0..n {
                    k[i * n + j] /= libm::pow(rule.nodes[j], beta);
                }
            }
            nonsymmetric_det(&k, &rule.weights)
        }
    }
}

/// Nodes `x = s t^2` and weights `2 s t w` from Gauss–Legendre on `(0, 1)`.
pub fn sqrt_nodes(s: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = make_rule(QuadratureKind::GaussLegendre, n, 0.0, 1.0)?;
    let x = rule.nodes.iter().map(|t| s * t * t).collect();
    let w = rule.nodes.iter().zip(&rule.weights).map(|(t, w)| 2.0 * s * t * w).collect();
    Ok((x, w))
}

// det(I - K W): the weights may be negative-free but the kernel is not
// symmetrisable after the column rescaling, so use it as is.
fn nonsymmetric_det(k: &[f64], w: &[f64]) -> Result<FredholmDet> {
    let n = w.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = k[i * n + j] * w[j];
            a[i * n + j] = if i == j { 1.0 - d } else { -d };
        }
    }
    let (sign, logdet) = Lu::factor(n, a)?.log_det();
    Ok(FredholmDet { det: sign * libm::exp(logdet), logdet, sign })
}

/// Gap probability `E_M(0; (0, s))` with node doubling.
///
/// `M = 1` discretises `K_1` on `(0, s)` with a Gauss–Jacobi rule of weight
/// `x^{nu_1}` (plain Gauss–Legendre when `nu_1 = 0`). `M = 2` goes through the
/// MB identity when the parameters allow it and the square-root substitution
/// otherwise; for generic `nu` the latter converges algebraically, since
/// `y^{nu_1}` and `y^{nu_2}` cannot both be absorbed.
pub fn gap_probability_hardedge(bundle: &KernelBundle, s: f64, target_tol: f64) -> Result<GapPoint> {
    let route = if mb_for_params(bundle).is_some() {
        HardEdgeRoute::MbIdentity
    } else {
        HardEdgeRoute::SqrtSubstitution
    };
    gap_probability_hardedge_via(bundle, s, target_tol, route)
}

pub fn gap_probability_hardedge_via(
    bundle: &KernelBundle,
    s: f64,
    target_tol: f64,
    route: HardEdgeRoute,
) -> Result<GapPoint> {
    if !(s > 0.0) {
        return Err(Error::Domain("s must be positive"));
    }
    if bundle.params.m == 1 {
        // psi carries y^{nu_1} times an entire function, so the Jacobi
        // weight y^{nu_1} leaves an analytic integrand
        return doubling(s, target_tol, |n| hardedge_logdet(bundle, s, n, HardEdgeRoute::GaussJacobi).map(|d| d.logdet));
    }
    doubling(s, target_tol, |n| hardedge_logdet(bundle, s, n, route).map(|d| d.logdet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{build_kernel_bundle, HardEdgeParams};

    #[test]
    fn zero_kernel() {
        let rule = make_rule(QuadratureKind::GaussLegendre, 8, 0.0, 3.0).unwrap();
        let d = fredholm_det(|_, _| 0.0, &rule).unwrap();
        assert_eq!(d.det, 1.0);
        assert_eq!(d.logdet, 0.0);
    }

    #[test]
    fn rank_one() {
        let rule = make_rule(QuadratureKind::GaussLegendre, 16, 0.0, 1.0).unwrap();
        let d = fredholm_det(|x, y| x * y, &rule).unwrap();
        assert!((d.det - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mb_r4_fixed_nodes() {
        let mb = MBParams::new(0.0, 2.0).unwrap();
        let d = mb_logdet(&mb, 4.0, 48, QuadratureKind::GaussLegendre).unwrap();
        assert!((d.logdet - -5.96549338586).abs() < 1e-8, "{}", d.logdet);
    }

    #[test]
    fn mb_small_interval() {
        let mb = MBParams::new(0.0, 2.0).unwrap();
        let p = gap_probability_mb(&mb, 1e-4, 1e-12).unwrap();
        assert!((p.e - 1.0).abs() < 1e-3);
    }

    #[test]
    fn refuses_large_r() {
        let mb = MBParams::new(0.0, 2.0).unwrap();
        assert!(mb_logdet(&mb, 16.0, 16, QuadratureKind::GaussLegendre).is_err());
    }

    #[test]
    fn curve_validation() {
        let mut c = GapCurve::new(Abscissa::S);
        c.points.push(GapPoint::from_log(1.0, -0.5, 16, 0.0));
        c.points.push(GapPoint::from_log(2.0, -0.9, 16, 0.0));
        assert!(c.validate(0.0).is_ok());
        c.points.push(GapPoint::from_log(3.0, -0.2, 16, 0.0));
        assert!(c.validate(0.0).is_err());
    }

    #[test]
    fn m1_small_interval() {
        let b = build_kernel_bundle(HardEdgeParams::m1(0.0).unwrap()).unwrap();
        let p = gap_probability_hardedge(&b, 1e-6, 1e-12).unwrap();
        assert!((p.e - 1.0).abs() < 1e-5);
    }
}
