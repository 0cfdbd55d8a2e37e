//! Hard-edge correlation kernels for `M = 1, 2` and the Muttalib–Borodin kernel.

use alloc::vec;
use alloc::vec::Vec;

use crate::quadrature::gauss_legendre;
use crate::special::{
    bessel_j, elementary_symmetric, gamma_real, hyp0f2_reg, wright_bessel, SeriesControl,
};
use crate::{Error, Result};

/// Offset used both as the diagonal threshold and as the symmetric offset.
pub const DIAGONAL_DELTA: f64 = 1e-5;

/// Distance from an integer below which `nu2 - nu1` is treated as non-generic.
pub const GENERIC_GAP: f64 = 1e-6;

/// Product parameters `{M, nu_0 = 0, nu_1, ..., nu_M}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardEdgeParams {
    pub m: usize,
    pub nu: Vec<f64>,
    /// `(e_1, ..., e_{M+1})` of all the `nu`.
    pub e: Vec<f64>,
    /// Coefficients of `prod_{m>=1} (x - nu_m) = sum_i alpha_i x^i`.
    pub alpha: Vec<f64>,
}

impl HardEdgeParams {
    /// `nu` must start with `nu_0 = 0`.
    pub fn new(nu: &[f64]) -> Result<Self> {
        let m = nu.len().saturating_sub(1);
        if !(1..=2).contains(&m) {
            return Err(Error::Domain("only M = 1 and M = 2 are supported"));
        }
        if nu[0] != 0.0 {
            return Err(Error::Domain("nu_0 must be 0"));
        }
        if nu.iter().any(|&v| !(v > -1.0) || !v.is_finite()) {
            return Err(Error::Domain("every nu_m must exceed -1"));
        }
        let e = elementary_symmetric(nu);
        let mut alpha = vec![1.0];
        for &v in &nu[1..] {
            let mut next = vec![0.0; alpha.len() + 1];
            for (i, &a) in alpha.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= v * a;
            }
            alpha = next;
        }
        Ok(Self { m, nu: nu.to_vec(), e, alpha })
    }

    pub fn m1(nu1: f64) -> Result<Self> {
        Self::new(&[0.0, nu1])
    }

    pub fn m2(nu1: f64, nu2: f64) -> Result<Self> {
        Self::new(&[0.0, nu1, nu2])
    }

    /// The special set `nu = (0, -1/2, 0)`.
    pub fn special() -> Self {
        Self::m2(-0.5, 0.0).expect("valid parameters")
    }

    /// `e_k` with `e_0 = 1` and `e_k = 0` beyond `M + 1`.
    pub fn ek(&self, k: usize) -> f64 {
        match k {
            0 => 1.0,
            k if k <= self.e.len() => self.e[k - 1],
            _ => 0.0,
        }
    }

    /// `nu2 - nu1` away from the integers (always true for `M = 1`).
    pub fn is_generic(&self) -> bool {
        if self.m < 2 {
            return true;
        }
        let d = self.nu[2] - self.nu[1];
        (d - libm::round(d)).abs() >= GENERIC_GAP
    }

    pub fn check_generic(&self) -> Result<()> {
        if self.is_generic() {
            Ok(())
        } else {
            Err(Error::NonGeneric(self.nu[2] - self.nu[1]))
        }
    }
}

/// Kernel functions `phi_j`, `psi_j` for a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBundle {
    pub params: HardEdgeParams,
    pub ctl: SeriesControl,
    // Gamma prefactors of the two psi branches (M = 2 only).
    c1: f64,
    c2: f64,
}

pub fn build_kernel_bundle(params: HardEdgeParams) -> Result<KernelBundle> {
    build_kernel_bundle_with(params, SeriesControl { max_terms: 200, tail_tol: 1e-18 })
}

pub fn build_kernel_bundle_with(params: HardEdgeParams, ctl: SeriesControl) -> Result<KernelBundle> {
    let (mut c1, mut c2) = (0.0, 0.0);
    if params.m == 2 {
        params.check_generic()?;
        let (n1, n2) = (params.nu[1], params.nu[2]);
        c1 = gamma_real(n2 - n1)? * gamma_real(n1 - n2 + 1.0)?;
        c2 = gamma_real(n1 - n2)? * gamma_real(n2 - n1 + 1.0)?;
    }
    Ok(KernelBundle { params, ctl, c1, c2 })
}

impl KernelBundle {
    pub fn m(&self) -> usize {
        self.params.m
    }

    /// `(phi_0..phi_M)(x)` and `(psi_0..psi_M)(x)`.
    pub fn phi_psi(&self, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(x > 0.0) {
            return Err(Error::Domain("kernel functions need x > 0"));
        }
        match self.params.m {
            1 => self.phi_psi_m1(x),
            _ => self.phi_psi_m2(x),
        }
    }

    fn phi_psi_m1(&self, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (n0, n1) = (self.params.nu[0], self.params.nu[1]);
        let a = n1 - n0;
        let r = 2.0 * libm::sqrt(x);
        let ja = bessel_j(a, r, self.ctl)?.checked("bessel_j")?;
        let jb = bessel_j(a + 1.0, r, self.ctl)?.checked("bessel_j")?;
        let h = 0.5 * (n0 + n1);
        let p0 = libm::pow(x, -h) * ja;
        let p1 = n0 * p0 + libm::pow(x, 0.5 - h) * jb;
        let q0 = -n0 * libm::pow(x, h) * ja - libm::pow(x, h + 0.5) * jb;
        let q1 = libm::pow(x, h) * ja;
        Ok((vec![p0, p1], vec![q0, q1]))
    }

    fn phi_psi_m2(&self, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let nu = &self.params.nu;
        let (n0, n1, n2) = (nu[0], nu[1], nu[2]);
        let ctl = self.ctl;
        let f = |k: f64| hyp0f2_reg(n1 - n0 + k, n2 - n0 + k, -x, ctl).checked("0F2");
        let (f1, f2, f3) = (f(1.0)?, f(2.0)?, f(3.0)?);
        let xm = libm::pow(x, -n0);
        let p0 = -xm * f1;
        let p1 = -n0 * xm * f1 - x * xm * f2;
        let p2 = -n0 * n0 * xm * f1 + (1.0 - 2.0 * n0) * x * xm * f2 - x * x * xm * f3;

        let (xp1, xp2) = (libm::pow(x, n1), libm::pow(x, n2));
        // T(k) = c1 x^nu1 0F2reg(nu1-nu0+k, nu1-nu2+1; x) + c2 x^nu2 0F2reg(nu2-nu0+k, nu2-nu1+1; x)
        let tt = |k: f64| -> Result<f64> {
            let a = hyp0f2_reg(n1 - n0 + k, n1 - n2 + 1.0, x, ctl).checked("0F2")?;
            let b = hyp0f2_reg(n2 - n0 + k, n2 - n1 + 1.0, x, ctl).checked("0F2")?;
            Ok(self.c1 * xp1 * a + self.c2 * xp2 * b)
        };
        let (tm, t0, tp) = (tt(-1.0)?, tt(0.0)?, tt(1.0)?);
        let q0 = tm + (n0 - n1 - n2 + 1.0) * t0 + n1 * n2 * tp;
        let q1 = t0 - (n1 + n2) * tp;
        let q2 = tp;
        Ok((vec![p0, p1, p2], vec![q0, q1, q2]))
    }

    /// `K_M(x, y)` with the off-diagonal quotient or its diagonal limit.
    pub fn kernel_value(&self, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain("kernel needs x, y > 0"));
        }
        if is_near_diagonal(x, y) {
            return self.diagonal(x);
        }
        let (p, _) = self.phi_psi(x)?;
        let (_, q) = self.phi_psi(y)?;
        Ok(dot(&p, &q) / (x - y))
    }

    /// `K(x, x)` from the symmetric offset average plus one Richardson step.
    pub fn diagonal(&self, x: f64) -> Result<f64> {
        self.diagonal_with(x, DIAGONAL_DELTA)
    }

    pub fn diagonal_with(&self, x: f64, delta: f64) -> Result<f64> {
        let (_, q) = self.phi_psi(x)?;
        let off = |h: f64| -> Result<f64> {
            let (pa, _) = self.phi_psi(x * (1.0 + h))?;
            let (pb, _) = self.phi_psi(x * (1.0 - h))?;
            Ok(0.5 * (dot(&pa, &q) / (x * h) - dot(&pb, &q) / (x * h)))
        };
        let k1 = off(delta)?;
        let k2 = off(0.5 * delta)?;
        Ok((4.0 * k2 - k1) / 3.0)
    }

    /// Kernel matrix `K(x_i, x_j)`, reusing `phi`, `psi` at each node.
    pub fn kernel_matrix(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        let n = nodes.len();
        let mut ps = Vec::with_capacity(n);
        for &x in nodes {
            ps.push(self.phi_psi(x)?);
        }
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                k[i * n + j] = if is_near_diagonal(nodes[i], nodes[j]) {
                    if i == j || nodes[i] == nodes[j] {
                        self.diagonal(nodes[i])?
                    } else {
                        self.kernel_value(nodes[i], nodes[j])?
                    }
                } else {
                    dot(&ps[i].0, &ps[j].1) / (nodes[i] - nodes[j])
                };
            }
        }
        Ok(k)
    }
}

fn is_near_diagonal(x: f64, y: f64) -> bool {
    (x - y).abs() < DIAGONAL_DELTA * x.max(y)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

/// Free-standing form of [`KernelBundle::kernel_value`].
pub fn kernel_value(bundle: &KernelBundle, x: f64, y: f64) -> Result<f64> {
    bundle.kernel_value(x, y)
}

/// Muttalib–Borodin parameters `(c, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MBParams {
    pub c: f64,
    pub theta: f64,
    pub ctl: SeriesControl,
    pub inner_nodes: usize,
}

impl MBParams {
    pub fn new(c: f64, theta: f64) -> Result<Self> {
        if !(c > -1.0) || !(theta > 0.0) {
            return Err(Error::Domain("MB kernel needs c > -1 and theta > 0"));
        }
        Ok(Self { c, theta, ctl: SeriesControl::default(), inner_nodes: 64 })
    }

    pub fn with_inner_nodes(mut self, n: usize) -> Self {
        self.inner_nodes = n;
        self
    }

    /// `nu_j = (c + j)/theta - 1` for `j = 1, 2` (with `nu_0 = 0` by convention).
    pub fn hard_edge_nu(&self) -> (f64, f64) {
        ((self.c + 1.0) / self.theta - 1.0, (self.c + 2.0) / self.theta - 1.0)
    }
}

struct InnerRule {
    u: Vec<f64>,
    w: Vec<f64>,
}

fn inner_rule(n: usize) -> InnerRule {
    let (t, w) = gauss_legendre(n);
    InnerRule {
        u: t.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w: w.iter().map(|w| 0.5 * w).collect(),
    }
}

/// `K^{(c,theta)}(x, y) = theta x^c ∫_0^1 J_{(c+1)/theta, 1/theta}(xu) J_{c+1,theta}((yu)^theta) u^c du`.
pub fn borodin_kernel(mb: &MBParams, x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::Domain("MB kernel needs x, y >= 0"));
    }
    if mb.inner_nodes < 2 {
        return Err(Error::Domain("inner_nodes >= 2"));
    }
    let rule = inner_rule(mb.inner_nodes);
    let (a1, b1) = ((mb.c + 1.0) / mb.theta, 1.0 / mb.theta);
    let mut acc = 0.0;
    for (&u, &w) in rule.u.iter().zip(&rule.w) {
        let fa = wright_bessel(a1, b1, x * u, mb.ctl)?.checked("wright_bessel")?;
        let fb = wright_bessel(mb.c + 1.0, mb.theta, libm::pow(y * u, mb.theta), mb.ctl)?
            .checked("wright_bessel")?;
        acc += w * libm::pow(u, mb.c) * fa * fb;
    }
    Ok(mb.theta * libm::pow(x, mb.c) * acc)
}

/// `K^{(c,theta)}(x_i, x_j)` for all node pairs, factoring the inner integral.
pub fn borodin_kernel_matrix(mb: &MBParams, nodes: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    let rule = inner_rule(mb.inner_nodes);
    let nk = rule.u.len();
    let (a1, b1) = ((mb.c + 1.0) / mb.theta, 1.0 / mb.theta);
    let mut a = vec![0.0; n * nk];
    let mut b = vec![0.0; n * nk];
    for (i, &x) in nodes.iter().enumerate() {
        for (k, &u) in rule.u.iter().enumerate() {
            let wu = rule.w[k] * libm::pow(u, mb.c);
            a[i * nk + k] = wu * wright_bessel(a1, b1, x * u, mb.ctl)?.checked("wright_bessel")?;
            b[i * nk + k] = wright_bessel(mb.c + 1.0, mb.theta, libm::pow(x * u, mb.theta), mb.ctl)?
                .checked("wright_bessel")?;
        }
    }
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        let pre = mb.theta * libm::pow(nodes[i], mb.c);
        for j in 0..n {
            let s: f64 = (0..nk).map(|q| a[i * nk + q] * b[j * nk + q]).sum();
            k[i * n + j] = pre * s;
        }
    }
    Ok(k)
}
