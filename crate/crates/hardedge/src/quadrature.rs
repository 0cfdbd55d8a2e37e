//! Quadrature rules on finite intervals.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::special::ln_gamma;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureKind {
    GaussLegendre,
    ClenshawCurtis,
    /// Gauss–Jacobi for the weight `(x - a)^beta`; weights absorb the weight function.
    GaussJacobi { beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Build an `n`-point rule on `(a, b)`.
pub fn make_rule(kind: QuadratureKind, n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::Domain("quadrature needs n >= 2"));
    }
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain("quadrature needs a finite interval with b > a"));
    }
    let (t, w) = match kind {
        QuadratureKind::GaussLegendre => gauss_legendre(n),
        QuadratureKind::ClenshawCurtis => clenshaw_curtis(n),
        QuadratureKind::GaussJacobi { beta } => {
            if !(beta > -1.0) {
                return Err(Error::Domain("Gauss-Jacobi needs beta > -1"));
            }
            gauss_jacobi(n, 0.0, beta)?
        }
    };
    let h = 0.5 * (b - a);
    let wscale = match kind {
        QuadratureKind::GaussJacobi { beta } => libm::pow(h, beta + 1.0),
        _ => h,
    };
    let nodes = t.iter().map(|&t| a + h * (t + 1.0)).collect();
    let weights = w.iter().map(|&w| w * wscale).collect();
    Ok(QuadratureRule { kind, n, a, b, nodes, weights })
}

/// Gauss–Legendre nodes (increasing) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Clenshaw–Curtis on `[-1, 1]`, endpoints included, increasing order.
pub fn clenshaw_curtis(n: usize) -> (Vec<f64>, Vec<f64>) {
    let big_n = n - 1;
    let nf = big_n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n {
        let th = PI * k as f64 / nf;
        x[n - 1 - k] = libm::cos(th);
        let mut s = 0.0;
        for j in 1..=big_n / 2 {
            let bj = if 2 * j == big_n { 1.0 } else { 2.0 };
            let jf = j as f64;
            s += bj / (4.0 * jf * jf - 1.0) * libm::cos(2.0 * jf * th);
        }
        let ck = if k == 0 || k == big_n { 1.0 } else { 2.0 };
        w[n - 1 - k] = ck / nf * (1.0 - s);
    }
    // exact symmetry and a clean midpoint
    for k in 0..n / 2 {
        let v = 0.5 * (x[n - 1 - k] - x[k]);
        x[k] = -v;
        x[n - 1 - k] = v;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Jacobi for `(1-t)^alpha (1+t)^beta` on `[-1, 1]` (Golub–Welsch).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let ab = alpha + beta;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for k in 0..n {
        let kf = k as f64;
        let d = 2.0 * kf + ab;
        diag[k] = if k == 0 && ab.abs() < 1e-14 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (d * (d + 2.0))
        };
        if k + 1 < n {
            let j = kf + 1.0;
            let dj = 2.0 * j + ab;
            let num = 4.0 * j * (j + alpha) * (j + beta) * (j + ab);
            let den = dj * dj * (dj + 1.0) * (dj - 1.0);
            off[k] = libm::sqrt(num / den);
        }
    }
    let (vals, first) = tridiag_eig(&diag, &off)?;
    let (la, _) = ln_gamma(alpha + 1.0);
    let (lb, _) = ln_gamma(beta + 1.0);
    let (lab, _) = ln_gamma(ab + 2.0);
    let mu0 = libm::exp((ab + 1.0) * core::f64::consts::LN_2 + la + lb - lab);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(core::cmp::Ordering::Equal));
    let x = idx.iter().map(|&i| vals[i]).collect();
    let w = idx.iter().map(|&i| mu0 * first[i] * first[i]).collect();
    Ok((x, w))
}

/// Eigenvalues of a symmetric tridiagonal matrix and the first component of
/// each normalised eigenvector (implicit QL with Wilkinson shifts).
pub fn tridiag_eig(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.resize(n, 0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    // z holds the first row of the accumulated rotation matrix
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence { what: "tridiagonal QL", terms: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}
