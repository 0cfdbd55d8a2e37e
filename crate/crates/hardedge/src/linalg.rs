//! Dense LU with partial pivoting and small complex solves.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Complex64, Error, Result};

/// Row-major square matrix factorised in place as `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(n: usize, mut a: Vec<f64>) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * f64::EPSILON * scale || !best.is_finite() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= f * a[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, a, perm, sign })
    }

    /// `(sign, ln|det|)`, accumulated from the pivots.
    pub fn log_det(&self) -> (f64, f64) {
        let mut s = self.sign;
        let mut l = 0.0;
        for k in 0..self.n {
            let d = self.a[k * self.n + k];
            if d < 0.0 {
                s = -s;
            }
            l += libm::log(d.abs());
        }
        (s, l)
    }

    pub fn det(&self) -> f64 {
        let (s, l) = self.log_det();
        s * libm::exp(l)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i * n + j] * x[j];
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }
}

/// Solve a small complex system by Gaussian elimination with partial pivoting.
pub fn solve_c(n: usize, a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.norm())).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if m[i * n + k].norm() > m[p * n + k].norm() {
                p = i;
            }
        }
        if m[p * n + k].norm() <= 1e-300 * scale.max(1.0) {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let f = m[i * n + k] / m[k * n + k];
            for j in k..n {
                let v = m[k * n + j];
                m[i * n + j] -= f * v;
            }
            let v = x[k];
            x[i] -= f * v;
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in i + 1..n {
            acc -= m[i * n + j] * x[j];
        }
        x[i] = acc / m[i * n + i];
    }
    Ok(x)
}

/// Real linear least squares via normal equations on a column-scaled design.
/// `rows` holds `m` rows of `k` entries.
pub fn lstsq(k: usize, rows: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = rows.len();
    if m < k {
        return Err(Error::Degenerate);
    }
    // Householder QR on the scaled design avoids squaring the condition number.
    let mut scale = vec![0.0; k];
    for r in rows {
        for j in 0..k {
            scale[j] = f64::max(scale[j], r[j].abs());
        }
    }
    if scale.iter().any(|&s| s == 0.0) {
        return Err(Error::Degenerate);
    }
    let mut a: Vec<Vec<f64>> = rows.iter().map(|r| (0..k).map(|j| r[j] / scale[j]).collect()).collect();
    let mut b = rhs.to_vec();
    for j in 0..k {
        let norm = libm::sqrt((j..m).map(|i| a[i][j] * a[i][j]).sum::<f64>());
        if norm < 1e-13 {
            return Err(Error::Degenerate);
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..m).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|t| t * t).sum();
        if vn > 0.0 {
            for c in j..k {
                let d: f64 = (j..m).map(|i| v[i - j] * a[i][c]).sum::<f64>() * 2.0 / vn;
                for i in j..m {
                    a[i][c] -= d * v[i - j];
                }
            }
            let d: f64 = (j..m).map(|i| v[i - j] * b[i]).sum::<f64>() * 2.0 / vn;
            for i in j..m {
                b[i] -= d * v[i - j];
            }
        }
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = b[i];
        for j in i + 1..k {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Ok(x.iter().zip(&scale).map(|(v, s)| v / s).collect())
}
