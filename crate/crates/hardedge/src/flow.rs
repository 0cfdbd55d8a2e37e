//! Hamiltonian ODE systems for `M = 1, 2`, their first integrals and
//! structural identities, and the gap probability from the resolvent.

use alloc::vec;
use alloc::vec::Vec;

use crate::fredholm::{sqrt_nodes, Abscissa, GapCurve, GapPoint};
use crate::kernels::{build_kernel_bundle, HardEdgeParams, KernelBundle};
use crate::linalg::Lu;
use crate::ode::{integrate as ode_integrate, OdeOptions, OdeStats};
use crate::residual::{normalized_c, Residuals};
use crate::special::gamma_real;
use crate::{Complex64, Error, Result};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

fn re(v: f64) -> C {
    C::new(v, 0.0)
}

/// Phase-space point `{s, x_m, y_m, xi_m, eta_m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianState {
    pub m: usize,
    pub s: f64,
    pub x: Vec<C>,
    pub y: Vec<C>,
    pub xi: Vec<C>,
    pub eta: Vec<C>,
}

impl HamiltonianState {
    pub fn dim(m: usize) -> usize {
        4 * (m + 1)
    }

    pub fn pack(&self) -> Vec<C> {
        let mut v = Vec::with_capacity(Self::dim(self.m));
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.y);
        v.extend_from_slice(&self.xi);
        v.extend_from_slice(&self.eta);
        v
    }

    pub fn unpack(m: usize, s: f64, v: &[C]) -> Self {
        let k = m + 1;
        Self {
            m,
            s,
            x: v[0..k].to_vec(),
            y: v[k..2 * k].to_vec(),
            xi: v[2 * k..3 * k].to_vec(),
            eta: v[3 * k..4 * k].to_vec(),
        }
    }

    /// `x_j y_k`.
    pub fn xy(&self, j: usize, k: usize) -> C {
        self.x[j] * self.y[k]
    }

    /// Largest `|Im|` of the `xi`, `eta` relative to `1 + |value|`.
    pub fn imaginary_leakage(&self) -> f64 {
        self.xi
            .iter()
            .chain(&self.eta)
            .map(|v| v.im.abs() / (1.0 + v.norm()))
            .fold(0.0, f64::max)
    }
}

/// Where an initial state came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedKind {
    /// Leading small-`s` series; `first_neglected` is the relative exponent
    /// of the first dropped correction and `estimate = s0^first_neglected`.
    Series { first_neglected: f64, estimate: f64 },
    /// Nyström resolvent with the given node count.
    Resolvent { nodes: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub state: HamiltonianState,
    /// `log E(s0)`.
    pub log_e: f64,
    pub kind: SeedKind,
}

/// Leading-order series data at `s0 <= 1e-3`.
pub fn initial_state(params: &HardEdgeParams, s0: f64) -> Result<Seed> {
    if !(s0 > 0.0 && s0 <= 1e-3) {
        return Err(Error::Domain("series initial data needs 0 < s0 <= 1e-3"));
    }
    let nu_min = params.nu[1..].iter().cloned().fold(f64::INFINITY, f64::min);
    let first_neglected = (nu_min + 1.0).min(1.0);
    let kind = SeedKind::Series { first_neglected, estimate: libm::pow(s0, first_neglected) };
    let s = s0;
    let g = gamma_real;
    let pw = |e: f64| libm::pow(s, e);
    if params.m == 1 {
        let (n0, n1) = (params.nu[0], params.nu[1]);
        let a = n1 - n0;
        let ga1 = g(a + 1.0)?;
        let ga2 = g(a + 2.0)?;
        let ga3 = g(a + 3.0)?;
        let lead = pw(a + 1.0) / (ga2 * ga1);
        let x = vec![
            I * pw(-n0) / ga1,
            I * n0 * pw(-n0) / ga1 + I * (1.0 - n0) * pw(1.0 - n0) / ga2,
        ];
        let y = vec![
            -I * n0 * pw(n1) / ga1 + I * (n0 - 1.0) * pw(n1 + 1.0) / ga2,
            I * pw(n1) / ga1,
        ];
        let eta = vec![re(-lead), re(-n0 * lead + (1.0 - 2.0 * n0) * pw(a + 2.0) / (ga3 * ga1))];
        let xi = vec![
            re(n0 * n1 + n0 * (a + 1.0) * pw(a + 1.0) / (ga2 * ga2) + (1.0 - 2.0 * n0) * pw(a + 2.0) / (ga3 * ga1)),
            re(-n0 - n1 - lead),
        ];
        let state = HamiltonianState { m: 1, s, x, y, xi, eta };
        return Ok(Seed { state, log_e: -lead / (a + 1.0), kind });
    }
    params.check_generic()?;
    let (n0, n1, n2) = (params.nu[0], params.nu[1], params.nu[2]);
    let (e1, e2, e3) = (params.ek(1), params.ek(2), params.ek(3));
    let (a1, a2) = (n1 - n0, n2 - n0);
    let g21 = g(n2 - n1)?;
    let g12 = g(n1 - n2)?;
    let g21m = g(n2 - n1 - 1.0)?;
    let g12m = g(n1 - n2 - 1.0)?;
    let (ga1_1, ga1_2, ga1_3) = (g(a1 + 1.0)?, g(a1 + 2.0)?, g(a1 + 3.0)?);
    let (ga2_1, ga2_2, ga2_3) = (g(a2 + 1.0)?, g(a2 + 2.0)?, g(a2 + 3.0)?);
    let x0 = -I * pw(-n0) / (ga1_1 * ga2_1);
    let x1 = -I * n0 * pw(-n0) / (ga1_1 * ga2_1) - I * (1.0 - n0) * pw(1.0 - n0) / (ga1_2 * ga2_2);
    let x2 = -I * n0 * n0 * pw(-n0) / (ga1_1 * ga2_1)
        + I * (1.0 - n0) * (1.0 - n0) * pw(1.0 - n0) / (ga1_2 * ga2_2);
    let y0 = I * n0 * n2 * g21 * pw(n1) / ga1_1
        - I * (n0 * n2 - n0 + n1 - n2 + 1.0) * g21m * pw(n1 + 1.0) / ga1_2
        + I * n0 * n1 * g12 * pw(n2) / ga2_1
        - I * (n0 * n1 - n0 + n2 - n1 + 1.0) * g12m * pw(n2 + 1.0) / ga2_2;
    let y1 = -I * (n0 + n2) * g21 * pw(n1) / ga1_1 - I * (n0 + n1) * g12 * pw(n2) / ga2_1;
    let y2 = I * g21 * pw(n1) / ga1_1 + I * g12 * pw(n2) / ga2_1;
    let a = g21 * pw(a1 + 1.0) / (ga1_2 * ga1_1 * ga2_1);
    let b = g12 * pw(a2 + 1.0) / (ga1_1 * ga2_2 * ga2_1);
    let ta = g21m * pw(a1 + 2.0) / (ga1_3 * ga1_1 * ga2_2);
    let tb = g12m * pw(a2 + 2.0) / (ga1_2 * ga2_3 * ga2_1);
    let eta0 = -a - b;
    let eta1 = -n0 * a + (-n0 * n0 - n0 * n1 + 2.0 * n0 * n2 + n1 - n2 + 1.0) * ta - n0 * b
        + (-n0 * n0 - n0 * n2 + 2.0 * n0 * n1 + n2 - n1 + 1.0) * tb;
    let c3 = |p: f64, q: f64| {
        n0 * n0 * n0 - 2.0 * n0 - (2.0 * n0 * n0 - 2.0 * n0 + 1.0) * q + (1.0 - n0) * (1.0 - n0) * p + 1.0
    };
    let eta2 = -n0 * n0 * a - c3(n1, n2) * ta - n0 * n0 * b - c3(n2, n1) * tb;
    let c4 = |p: f64, q: f64| {
        p * n0 * n0 - n0 * n0 - 2.0 * p * p * n0 + n1 * n2 * n0 + q * n0 + 2.0 * n0 + p * p - n1 * n2 - q - 1.0
    };
    // the first bracket carries nu_2 where the second carries nu_1
    let xi0 = -e3 - n0 * n2 * a - c4(n2, n1) * ta - n0 * n1 * b - c4(n1, n2) * tb;
    let xi1 = e2 + (n0 + n2) * a + (n0 + n1) * b;
    let xi2 = -e1 - a - b;
    let state = HamiltonianState {
        m: 2,
        s,
        x: vec![x0, x1, x2],
        y: vec![y0, y1, y2],
        xi: vec![re(xi0), re(xi1), re(xi2)],
        eta: vec![re(eta0), re(eta1), re(eta2)],
    };
    let log_e = -(a / (a1 + 1.0) + b / (a2 + 1.0));
    Ok(Seed { state, log_e, kind })
}

/// Default Nyström size for the resolvent seed.
pub const SEED_NODES: usize = 32;

/// Initial data from the Nyström resolvent of the hard-edge kernel at `s0`.
///
/// `x_j = i(phi_j + K phi_j)(s)`, `y_j = i(psi_j + K^T psi_j)(s)` with
/// `(1 - K)^{-1}` applied on `(0, s0)`; `xi`, `eta` follow from the
/// corresponding inner products.
pub fn resolvent_state(bundle: &KernelBundle, s0: f64, nodes: usize) -> Result<Seed> {
    if !(s0 > 0.0) {
        return Err(Error::Domain("s0 must be positive"));
    }
    let m = bundle.m();
    let k1 = m + 1;
    let (xs, ws) = sqrt_nodes(s0, nodes)?;
    let n = nodes;
    let kmat = bundle.kernel_matrix(&xs)?;
    let mut p = Vec::with_capacity(n);
    let mut q = Vec::with_capacity(n);
    for &x in &xs {
        let (a, b) = bundle.phi_psi(x)?;
        p.push(a);
        q.push(b);
    }
    // (1 - K W) and (1 - K^T W)
    let mut a = vec![0.0; n * n];
    let mut at = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = if i == j { 1.0 } else { 0.0 };
            a[i * n + j] = d - kmat[i * n + j] * ws[j];
            at[i * n + j] = d - kmat[j * n + i] * ws[j];
        }
    }
    let lu = Lu::factor(n, a)?;
    let lut = Lu::factor(n, at)?;
    let (_, log_e) = lu.log_det();
    let mut u = vec![vec![0.0; n]; k1];
    let mut v = vec![vec![0.0; n]; k1];
    for j in 0..k1 {
        let pj: Vec<f64> = p.iter().map(|r| r[j]).collect();
        let qj: Vec<f64> = q.iter().map(|r| r[j]).collect();
        u[j] = lu.solve(&pj);
        v[j] = lut.solve(&qj);
    }
    let (ps, qs) = bundle.phi_psi(s0)?;
    let mut ks = vec![0.0; n];
    let mut kt = vec![0.0; n];
    for i in 0..n {
        ks[i] = bundle.kernel_value(s0, xs[i])?;
        kt[i] = bundle.kernel_value(xs[i], s0)?;
    }
    let mut x = vec![C::new(0.0, 0.0); k1];
    let mut y = vec![C::new(0.0, 0.0); k1];
    for j in 0..k1 {
        let sx: f64 = (0..n).map(|i| ks[i] * ws[i] * u[j][i]).sum();
        let sy: f64 = (0..n).map(|i| kt[i] * ws[i] * v[j][i]).sum();
        x[j] = I * (ps[j] + sx);
        y[j] = I * (qs[j] + sy);
    }
    let e = &bundle.params.e;
    let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
    let inner = |a: usize, b: usize| -> f64 { (0..n).map(|i| ws[i] * p[i][a] * v[b][i]).sum() };
    let xi: Vec<C> = (0..k1)
        .map(|mm| {
            let tail = if (m + 1 - mm) % 2 == 0 { 1.0 } else { -1.0 };
            re(sgn * inner(0, mm) + tail * e[m - mm])
        })
        .collect();
    let eta: Vec<C> = (0..k1).map(|mm| re(sgn * inner(mm, m))).collect();
    let state = HamiltonianState { m, s: s0, x, y, xi, eta };
    Ok(Seed { state, log_e, kind: SeedKind::Resolvent { nodes } })
}

/// Right-hand side in packed form, `d` receiving the derivative.
pub fn rhs_packed(m: usize, s: f64, z: &[C], d: &mut [C]) -> Result<()> {
    if s == 0.0 {
        return Err(Error::Domain("rhs is singular at s = 0"));
    }
    let inv = 1.0 / s;
    let sc = re(s);
    if m == 1 {
        let (x0, x1, y0, y1) = (z[0], z[1], z[2], z[3]);
        let (xi0, xi1, e0, e1) = (z[4], z[5], z[6], z[7]);
        d[0] = (-e0 * x0 - x1) * inv;
        d[1] = (-e1 * x0 + sc * x0 + xi0 * x0 + xi1 * x1) * inv;
        d[2] = (-xi0 * y1 - sc * y1 + e0 * y0 + e1 * y1) * inv;
        d[3] = (-xi1 * y1 + y0) * inv;
        d[4] = x0 * y0;
        d[5] = x0 * y1;
        d[6] = x0 * y1;
        d[7] = x1 * y1;
        return Ok(());
    }
    let (x, y, xi, eta) = (&z[0..3], &z[3..6], &z[6..9], &z[9..12]);
    d[0] = (-eta[0] * x[0] - x[1]) * inv;
    d[1] = (-eta[1] * x[0] - x[2]) * inv;
    d[2] = (-eta[2] * x[0] - sc * x[0] + xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]) * inv;
    d[3] = (-xi[0] * y[2] + sc * y[2] + eta[0] * y[0] + eta[1] * y[1] + eta[2] * y[2]) * inv;
    d[4] = (-xi[1] * y[2] + y[0]) * inv;
    d[5] = (-xi[2] * y[2] + y[1]) * inv;
    for k in 0..3 {
        d[6 + k] = -x[0] * y[k];
        d[9 + k] = -x[k] * y[2];
    }
    Ok(())
}

/// `(dx/ds, dy/ds, dxi/ds, deta/ds)` as a state-shaped value at the same `s`.
pub fn rhs(state: &HamiltonianState) -> Result<HamiltonianState> {
    let z = state.pack();
    let mut d = vec![C::new(0.0, 0.0); z.len()];
    rhs_packed(state.m, state.s, &z, &mut d)?;
    Ok(HamiltonianState::unpack(state.m, state.s, &d))
}

fn push_c(r: &mut Residuals, name: &'static str, terms: &[C]) {
    r.push(name, normalized_c(terms));
}

/// First integrals, each as `|sum| / max |summand|`.
pub fn first_integral_residuals(params: &HardEdgeParams, st: &HamiltonianState) -> Residuals {
    let mut r = Residuals::new();
    let s = re(st.s);
    if st.m == 1 {
        let e1 = re(params.ek(1));
        let e2 = re(params.ek(2));
        let (x0, x1, y0, y1) = (st.x[0], st.x[1], st.y[0], st.y[1]);
        let (xi0, xi1, eta0, eta1) = (st.xi[0], st.xi[1], st.eta[0], st.eta[1]);
        push_c(&mut r, "first", &[xi1, -eta0, e1]);
        push_c(&mut r, "trace", &[x0 * y0, x1 * y1]);
        push_c(&mut r, "second", &[eta1, xi0, -e2]);
        push_c(&mut r, "fourth", &[s * x0 * y1, eta0 * xi1, -eta0, -xi0, eta1, e2]);
        push_c(&mut r, "energy", &[eta0 * x0 * y0, (eta1 - xi0 - s) * x0 * y1, x1 * y0, -xi1 * x1 * y1, eta0]);
        return r;
    }
    let (e1, e2, e3) = (re(params.ek(1)), re(params.ek(2)), re(params.ek(3)));
    let xy = |j: usize, k: usize| st.xy(j, k);
    let (xi0, xi1, xi2) = (st.xi[0], st.xi[1], st.xi[2]);
    let (eta0, eta1, eta2) = (st.eta[0], st.eta[1], st.eta[2]);
    let one = re(1.0);
    let two = re(2.0);
    push_c(
        &mut r,
        "energy",
        &[
            eta0 * xy(0, 0),
            eta1 * xy(0, 1),
            (-xi0 + eta2 + s) * xy(0, 2),
            xy(1, 0),
            xy(2, 1),
            -xi1 * xy(1, 2),
            -xi2 * xy(2, 2),
            eta0,
        ],
    );
    push_c(&mut r, "first", &[xi2, -eta0, e1]);
    push_c(&mut r, "fourth", &[s * xy(0, 2), -eta0 * xi2, -eta1, xi1, -e2, eta0]);
    push_c(&mut r, "trace", &[xy(0, 0), xy(1, 1), xy(2, 2)]);
    push_c(
        &mut r,
        "fifth",
        &[
            -e3 * 3.0,
            e2 * (e1 + eta0 - one),
            -eta0 * (e1 - eta0 + one) * (e1 + eta0 - two),
            (e1 * 2.0 - one) * eta1,
            (one - e1) * xi1,
            -s * xy(0, 1),
            s * xy(0, 2) * (-eta0 * 2.0 + xi2 + two),
            s * xy(1, 2),
            -(eta2 + xi0) * 3.0,
        ],
    );
    push_c(
        &mut r,
        "sixth",
        &[
            e3 * 3.0,
            e2 * (-e1 * 2.0 + eta0 - re(4.0)),
            eta0 * (e1 - eta0 + one) * (e1 * 2.0 - eta0 + two),
            (-e1 - one) * eta1,
            (e1 * 2.0 - eta0 * 3.0 + re(4.0)) * xi1,
            s * xy(0, 1) * 2.0,
            s * xy(0, 2) * (e1 * 2.0 - eta0 + two),
            s * xy(1, 2),
            xi0 * 3.0,
        ],
    );
    push_c(
        &mut r,
        "seventh",
        &[
            e2 * (e1 + eta0 - one),
            -eta0 * (e1 - eta0 + one) * (e1 + eta0 - two),
            (-e1 + eta0 * 3.0 - re(4.0)) * eta1,
            (one - e1) * xi1,
            -s * xy(0, 1),
            -s * xy(0, 2) * (e1 + eta0 - two),
            -s * xy(1, 2) * 2.0,
            eta2 * 3.0,
        ],
    );
    push_c(
        &mut r,
        "eighth",
        &[
            e3,
            xi0,
            -eta2,
            -eta0 * xi1,
            -xi2 * eta1,
            -xy(2, 0),
            eta0 * xy(2, 1),
            -xi2 * xy(1, 0),
            eta0 * xi2 * xy(1, 1),
            -xi1 * xy(0, 0),
            (xi0 - eta2 - xi2 * eta1) * xy(0, 1),
            xi1 * eta1 * xy(0, 2),
            (xi0 - eta2 - eta0 * xi1) * xy(1, 2),
            eta1 * xy(2, 2),
        ],
    );
    push_c(&mut r, "alt_x1y2", &[e3, -s * xy(1, 2), eta2 * 2.0, xi0, -eta1, eta1 * xi2]);
    push_c(&mut r, "alt_x0y1", &[e2, -e3 * 2.0, -s * xy(0, 1), -eta2, -xi0 * 2.0, -xi1, eta0 * xi1]);
    r
}


/// Residue matrices of the linear system, row-major `(M+1)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchlesingerView {
    pub n: usize,
    pub e_mat: Vec<C>,
    pub c_mat: Vec<C>,
    pub a_mat: Vec<C>,
}

impl SchlesingerView {
    pub fn new(st: &HamiltonianState) -> Self {
        let n = st.m + 1;
        let z = C::new(0.0, 0.0);
        let mut e_mat = vec![z; n * n];
        let mut c_mat = vec![z; n * n];
        let mut a_mat = vec![z; n * n];
        for i in 0..n {
            for j in 0..n {
                a_mat[i * n + j] = st.x[i] * st.y[j];
            }
        }
        if st.m == 1 {
            e_mat[2] = re(1.0);
            c_mat = vec![-st.eta[0], re(-1.0), st.xi[0] - st.eta[1], st.xi[1]];
        } else {
            e_mat[6] = re(-1.0);
            c_mat = vec![
                -st.eta[0],
                re(-1.0),
                z,
                -st.eta[1],
                z,
                re(-1.0),
                st.xi[0] - st.eta[2],
                st.xi[1],
                st.xi[2],
            ];
        }
        Self { n, e_mat, c_mat, a_mat }
    }

    /// Largest 2x2 minor of `A` relative to the largest entry squared.
    pub fn rank_one_defect(&self) -> f64 {
        let n = self.n;
        let a = &self.a_mat;
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in i + 1..n {
                for j in 0..n {
                    for l in j + 1..n {
                        let minor = a[i * n + j] * a[k * n + l] - a[i * n + l] * a[k * n + j];
                        worst = worst.max(minor.norm());
                    }
                }
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / (scale * scale)
        }
    }
}

fn matmul(n: usize, a: &[C], b: &[C]) -> Vec<C> {
    let mut c = vec![C::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// `[a, b]`.
pub fn commutator(n: usize, a: &[C], b: &[C]) -> Vec<C> {
    let ab = matmul(n, a, b);
    let ba = matmul(n, b, a);
    ab.iter().zip(&ba).map(|(u, v)| u - v).collect()
}

// max |lhs - rhs| over entries, relative to the largest entry on either side
fn matrix_gap(lhs: &[C], rhs: &[C]) -> f64 {
    let scale = lhs.iter().chain(rhs).fold(0.0f64, |m, v| m.max(v.norm()));
    let d = lhs.iter().zip(rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    if scale == 0.0 {
        0.0
    } else {
        d / scale
    }
}

/// Schlesinger residuals `s A' - [C + sE, A]` and `C' - [E, A]`.
pub fn schlesinger_residuals(st: &HamiltonianState) -> Result<(f64, f64)> {
    let d = rhs(st)?;
    let v = SchlesingerView::new(st);
    let dv = SchlesingerView::new(&d);
    let n = v.n;
    // A' = x' y + x y'
    let mut a_dot = vec![C::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a_dot[i * n + j] = (d.x[i] * st.y[j] + st.x[i] * d.y[j]) * st.s;
        }
    }
    let cse: Vec<C> = v.c_mat.iter().zip(&v.e_mat).map(|(c, e)| c + e * st.s).collect();
    let r1 = matrix_gap(&a_dot, &commutator(n, &cse, &v.a_mat));
    // C' from the derivative state, minus the constant -1 entries
    let mut c_dot = dv.c_mat.clone();
    let constants: &[usize] = if st.m == 1 { &[1] } else { &[1, 5] };
    for &i in constants {
        c_dot[i] = C::new(0.0, 0.0);
    }
    let r2 = matrix_gap(&c_dot, &commutator(n, &v.e_mat, &v.a_mat));
    Ok((r1, r2))
}

/// Tracy–Widom variables `(t, q, p, u, v)` and their `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwPoint {
    pub t: f64,
    pub q: C,
    pub p: C,
    pub u: C,
    pub v: C,
    pub dq: C,
    pub dp: C,
    pub du: C,
    pub dv: C,
}

/// Map an `M = 1` state to Tracy–Widom variables at `t = 4s`.
pub fn tw_map(params: &HardEdgeParams, st: &HamiltonianState) -> Result<TwPoint> {
    if st.m != 1 {
        return Err(Error::Domain("Tracy-Widom map is defined for M = 1 only"));
    }
    let d = rhs(st)?;
    let s = st.s;
    let alpha = params.nu[1];
    let h = 0.5 * alpha;
    let (sp, sm) = (libm::pow(s, h), libm::pow(s, -h));
    let q = -I * sp * st.x[0];
    let u = -4.0 * st.eta[0];
    let p = -I * sm * st.y[0] + h * q;
    let v = -4.0 * st.xi[0] + h * u;
    // d/ds, then d/dt = (1/4) d/ds
    let dq_s = -I * (h * sp / s * st.x[0] + sp * d.x[0]);
    let du_s = -4.0 * d.eta[0];
    let dp_s = -I * (-h * sm / s * st.y[0] + sm * d.y[0]) + h * dq_s;
    let dv_s = -4.0 * d.xi[0] + h * du_s;
    Ok(TwPoint { t: 4.0 * s, q, p, u, v, dq: dq_s / 4.0, dp: dp_s / 4.0, du: du_s / 4.0, dv: dv_s / 4.0 })
}

/// Folding, Schlesinger, rank-one and (for `M = 1`) Tracy–Widom residuals.
pub fn structural_residuals(params: &HardEdgeParams, st: &HamiltonianState) -> Result<Residuals> {
    let mut r = Residuals::new();
    let (s1, s2) = schlesinger_residuals(st)?;
    r.push("schlesinger_a", s1);
    r.push("schlesinger_c", s2);
    r.push("rank_one", SchlesingerView::new(st).rank_one_defect());
    if st.m == 1 {
        let f = libm::pow(st.s, params.ek(1));
        push_c(&mut r, "fold_x1", &[st.x[1], st.y[0] * f]);
        push_c(&mut r, "fold_y1", &[st.y[1], -st.x[0] * f]);
        let tw = tw_map(params, st)?;
        let a2 = re(params.nu[1] * params.nu[1]);
        let t = re(tw.t);
        let (q, p, u, v) = (tw.q, tw.p, tw.u, tw.v);
        push_c(&mut r, "tw_quadratic", &[t * q * q, -u * u / 4.0, -u, -v * 2.0]);
        push_c(&mut r, "tw_u", &[u, -p * p * 4.0, (a2 - t + v * 2.0) * q * q, -q * p * u * 2.0]);
        push_c(&mut r, "tw_du", &[tw.du, -q * q]);
        push_c(&mut r, "tw_dv", &[tw.dv, -q * p]);
        push_c(&mut r, "tw_dq", &[t * tw.dq, -p, -q * u / 4.0]);
        push_c(&mut r, "tw_dp", &[t * tw.dp, -(a2 / 4.0 - t / 4.0 + v / 2.0) * q, p * u / 4.0]);
    }
    Ok(r)
}

/// Integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub s0: f64,
    pub tol: f64,
    /// Nyström nodes for the resolvent seed; `None` uses the leading series.
    pub seed_nodes: Option<usize>,
    /// Reject steps whose first-integral drift exceeds `100 tol`.
    pub monitor: bool,
}

impl FlowOptions {
    pub fn new(tol: f64) -> Self {
        Self { s0: 1e-4, tol, seed_nodes: Some(SEED_NODES), monitor: true }
    }
}

/// States at the requested abscissas plus `log E` from the resolvent.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: HardEdgeParams,
    pub s0: f64,
    pub tol: f64,
    /// `states[0]` is the seed at `s0`.
    pub states: Vec<HamiltonianState>,
    /// `log E` at each state.
    pub log_e: Vec<f64>,
    pub seed_kind: SeedKind,
    pub stats: OdeStats,
}

impl Trajectory {
    pub fn at(&self, s: f64) -> Option<&HamiltonianState> {
        self.states.iter().find(|st| st.s == s)
    }
}

/// Integrate from `opts.s0` through `targets`.
///
/// One extra component carries `∫ eta_0(t)/t dt`, seeded with `log E(s0)`, so
/// the gap probability comes out of the same adaptive step sequence.
pub fn integrate(params: &HardEdgeParams, targets: &[f64], opts: FlowOptions) -> Result<Trajectory> {
    if !(1e-12..=1e-6).contains(&opts.tol) {
        return Err(Error::Domain("tol must lie in [1e-12, 1e-6]"));
    }
    let seed = match opts.seed_nodes {
        Some(n) => resolvent_state(&build_kernel_bundle(params.clone())?, opts.s0, n)?,
        None => initial_state(params, opts.s0)?,
    };
    integrate_from(params, seed, targets, opts)
}

pub fn integrate_from(params: &HardEdgeParams, seed: Seed, targets: &[f64], opts: FlowOptions) -> Result<Trajectory> {
    let m = params.m;
    let dim = HamiltonianState::dim(m);
    let s0 = seed.state.s;
    let mut z0 = seed.state.pack();
    z0.push(re(seed.log_e));
    let p = params.clone();
    let f = |s: f64, z: &[C], d: &mut [C]| -> Result<()> {
        rhs_packed(m, s, &z[..dim], &mut d[..dim])?;
        d[dim] = z[3 * (m + 1)] / s;
        Ok(())
    };
    // baseline: the seed itself is only accurate to its own residual level
    let base = first_integral_residuals(&p, &seed.state).max();
    let drift = |s: f64, z: &[C]| -> (usize, f64) {
        let st = HamiltonianState::unpack(m, s, &z[..dim]);
        let r = first_integral_residuals(&p, &st);
        let mut worst = (0, 0.0);
        for (i, &(_, v)) in r.iter().enumerate() {
            let v = if v.is_nan() { f64::INFINITY } else { v };
            if v > worst.1 {
                worst = (i, v);
            }
        }
        worst
    };
    let mut ode = OdeOptions::new(opts.tol);
    if opts.monitor {
        ode.drift_limit = Some(100.0 * opts.tol + base);
    }
    let sol = ode_integrate(f, s0, &z0, targets, ode, drift)?;
    let mut states = vec![seed.state.clone()];
    let mut log_e = vec![seed.log_e];
    for (t, z) in sol.ts.iter().zip(&sol.ys) {
        states.push(HamiltonianState::unpack(m, *t, &z[..dim]));
        log_e.push(z[dim].re);
    }
    Ok(Trajectory {
        params: params.clone(),
        s0,
        tol: opts.tol,
        states,
        log_e,
        seed_kind: seed.kind,
        stats: sol.stats,
    })
}

/// Gap curve `E(s) = exp ∫_0^s eta_0(t)/t dt` along a trajectory.
pub fn gap_from_eta0(traj: &Trajectory) -> Result<GapCurve> {
    let mut c = GapCurve::new(Abscissa::S);
    for (st, &l) in traj.states.iter().zip(&traj.log_e) {
        if !l.is_finite() {
            return Err(Error::Domain("series head unavailable"));
        }
        c.points.push(GapPoint { abscissa: st.s, e: libm::exp(l), log_e: l, nodes: 0, est_error: traj.tol });
    }
    Ok(c)
}
