//! Real special functions: Gamma, regularized `0F2`, Wright–Bessel, Bessel `J`.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Truncation controls shared by every series in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub tail_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { max_terms: 100, tail_tol: 1e-18 }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, tail_tol: f64) -> Result<Self> {
        if max_terms == 0 || !(tail_tol > 0.0) {
            return Err(Error::Domain("max_terms >= 1 and tail_tol > 0 required"));
        }
        Ok(Self { max_terms, tail_tol })
    }
}

/// Result of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Number of terms summed.
    pub terms: usize,
    /// `false` when `max_terms` ran out first.
    pub converged: bool,
    /// Magnitude of the last term added.
    pub tail: f64,
    /// Largest term magnitude seen.
    pub max_term: f64,
}

impl SeriesValue {
    /// Decimal digits lost to cancellation.
    pub fn lost_digits(&self) -> f64 {
        if self.value == 0.0 {
            return if self.max_term == 0.0 { 0.0 } else { f64::INFINITY };
        }
        libm::log10(self.max_term / self.value.abs()).max(0.0)
    }

    /// More than ten digits cancelled.
    pub fn cancellation_flag(&self) -> bool {
        self.lost_digits() > 10.0
    }

    pub fn checked(self, what: &'static str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NonConvergence { what, terms: self.terms })
        }
    }
}

struct Summer {
    sum: f64,
    max_term: f64,
    small_run: u8,
    tol: f64,
}

impl Summer {
    fn new(tol: f64) -> Self {
        Self { sum: 0.0, max_term: 0.0, small_run: 0, tol }
    }

    // Returns true once two consecutive terms fall below the tolerance.
    // The floor `max_term * EPSILON` stops the relative test from chasing a
    // sum that has cancelled below rounding level.
    fn add(&mut self, t: f64, may_stop: bool) -> bool {
        self.sum += t;
        let a = t.abs();
        if a > self.max_term {
            self.max_term = a;
        }
        let scale = self.sum.abs().max(self.max_term * f64::EPSILON);
        if a <= self.tol * scale {
            self.small_run = self.small_run.saturating_add(1);
        } else {
            self.small_run = 0;
        }
        may_stop && self.small_run >= 2
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == libm::floor(x)
}

/// `Γ(x)`; reflection is handled inside `libm::tgamma`.
pub fn gamma_real(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(x));
    }
    Ok(libm::tgamma(x))
}

/// `ln|Γ(x)|` and the sign of `Γ(x)`.
pub fn ln_gamma(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

/// `1/Γ(x)`, exactly zero at the poles of `Γ`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 0.0 && x < 170.0 || x < 0.0 && x > -170.0 {
        let g = libm::tgamma(x);
        if g.is_finite() && g != 0.0 {
            return 1.0 / g;
        }
    }
    let (lg, sign) = ln_gamma(x);
    sign * libm::exp(-lg)
}

/// Regularized `0F2`: `Σ x^j / (j! Γ(b1+j) Γ(b2+j))`.
pub fn hyp0f2_reg(b1: f64, b2: f64, x: f64, ctl: SeriesControl) -> SeriesValue {
    // Terms with b+j at a pole vanish; do not stop before the last of them.
    let first_live = |b: f64| if b <= 0.0 { (-libm::floor(b)) as usize + 1 } else { 0 };
    let j_min = first_live(b1).max(first_live(b2));
    let mut pw = 1.0;
    let mut r1 = reciprocal_gamma(b1);
    let mut r2 = reciprocal_gamma(b2);
    let mut acc = Summer::new(ctl.tail_tol);
    let mut terms = 0;
    let mut last = 0.0;
    for j in 0..ctl.max_terms {
        let t = pw * r1 * r2;
        terms = j + 1;
        last = t.abs();
        if acc.add(t, j > j_min) || (x == 0.0 && j >= j_min) {
            return SeriesValue {
                value: acc.sum,
                terms,
                converged: true,
                tail: last,
                max_term: acc.max_term,
            };
        }
        let jf = j as f64;
        pw *= x / (jf + 1.0);
        r1 = step_rgamma(b1 + jf, r1);
        r2 = step_rgamma(b2 + jf, r2);
    }
    SeriesValue { value: acc.sum, terms, converged: false, tail: last, max_term: acc.max_term }
}

// 1/Γ(z+1) from 1/Γ(z).
fn step_rgamma(z: f64, rz: f64) -> f64 {
    if rz == 0.0 || z == 0.0 {
        reciprocal_gamma(z + 1.0)
    } else {
        rz / z
    }
}

/// Unregularized `0F2(;b1,b2;x) = Γ(b1)Γ(b2)·hyp0f2_reg`.
pub fn hyp0f2(b1: f64, b2: f64, x: f64, ctl: SeriesControl) -> Result<f64> {
    let g = gamma_real(b1)? * gamma_real(b2)?;
    Ok(g * hyp0f2_reg(b1, b2, x, ctl).checked("0F2")?)
}

/// Wright–Bessel `J_{a,b}(x) = Σ (-x)^j / (j! Γ(a + j b))`.
pub fn wright_bessel(a: f64, b: f64, x: f64, ctl: SeriesControl) -> Result<SeriesValue> {
    if !(b > 0.0) {
        return Err(Error::Domain("wright_bessel needs b > 0"));
    }
    if !x.is_finite() {
        return Err(Error::Domain("wright_bessel needs finite x"));
    }
    if x == 0.0 {
        let v = reciprocal_gamma(a);
        return Ok(SeriesValue { value: v, terms: 1, converged: true, tail: v.abs(), max_term: v.abs() });
    }
    let lx = libm::log(x.abs());
    let neg = x > 0.0;
    let mut acc = Summer::new(ctl.tail_tol);
    let mut prev_abs = f64::INFINITY;
    let mut terms = 0;
    let mut last = 0.0;
    for j in 0..ctl.max_terms {
        let jf = j as f64;
        let arg = a + jf * b;
        let t = if is_nonpositive_integer(arg) {
            0.0
        } else {
            let (lg, sg) = ln_gamma(arg);
            let (lf, _) = ln_gamma(jf + 1.0);
            let sign = if neg && j % 2 == 1 { -sg } else { sg };
            sign * libm::exp(jf * lx - lf - lg)
        };
        terms = j + 1;
        last = t.abs();
        // Past the peak the terms decrease monotonically.
        let decreasing = last <= prev_abs && !is_nonpositive_integer(arg);
        prev_abs = last;
        if acc.add(t, j > 0 && decreasing) {
            return Ok(SeriesValue { value: acc.sum, terms, converged: true, tail: last, max_term: acc.max_term });
        }
    }
    Ok(SeriesValue { value: acc.sum, terms, converged: false, tail: last, max_term: acc.max_term })
}

/// Largest argument for which the power series of `J_nu` is trusted.
pub const BESSEL_J_MAX_ARG: f64 = 40.0;

/// Classical `J_nu(x)` from its power series in `(x/2)^2`.
pub fn bessel_j(nu: f64, x: f64, ctl: SeriesControl) -> Result<SeriesValue> {
    if !(x >= 0.0) {
        return Err(Error::Domain("bessel_j needs x >= 0"));
    }
    if x > BESSEL_J_MAX_ARG {
        return Err(Error::NonConvergence { what: "bessel_j beyond validated range", terms: 0 });
    }
    if x == 0.0 {
        let v = if nu == 0.0 {
            1.0
        } else if is_nonpositive_integer(-nu) || nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        return Ok(SeriesValue { value: v, terms: 1, converged: true, tail: 0.0, max_term: v.abs() });
    }
    let h = 0.5 * x;
    let q = -h * h;
    let max_terms = ctl.max_terms.max(2 * x as usize + 20);
    let pre = libm::pow(h, nu);
    let mut pw = 1.0;
    let mut r = reciprocal_gamma(nu + 1.0);
    let j_min = if nu + 1.0 <= 0.0 { (-libm::floor(nu + 1.0)) as usize + 1 } else { 0 };
    let mut acc = Summer::new(ctl.tail_tol);
    let mut last = 0.0;
    let mut terms = 0;
    for k in 0..max_terms {
        let t = pw * r;
        terms = k + 1;
        last = t.abs();
        let kf = k as f64;
        if acc.add(t, kf > h && k > j_min) {
            return Ok(SeriesValue {
                value: pre * acc.sum,
                terms,
                converged: true,
                tail: pre.abs() * last,
                max_term: pre.abs() * acc.max_term,
            });
        }
        pw *= q / (kf + 1.0);
        r = step_rgamma(nu + 1.0 + kf, r);
    }
    Ok(SeriesValue {
        value: pre * acc.sum,
        terms,
        converged: false,
        tail: pre.abs() * last,
        max_term: pre.abs() * acc.max_term,
    })
}

/// Elementary symmetric polynomials `(e_1, ..., e_n)`.
pub fn elementary_symmetric(nus: &[f64]) -> Vec<f64> {
    let n = nus.len();
    let mut e = alloc::vec![0.0; n + 1];
    e[0] = 1.0;
    for (k, &v) in nus.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e.remove(0);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_real(1.0).unwrap(), 1.0);
        assert!((gamma_real(0.5).unwrap() - SQRT_PI).abs() < 1e-15);
        assert!((gamma_real(-0.5).unwrap() + 2.0 * SQRT_PI).abs() < 1e-14);
        assert!(matches!(gamma_real(-3.0), Err(Error::Pole(_))));
        assert!(matches!(gamma_real(0.0), Err(Error::Pole(_))));
    }

    #[test]
    fn gamma_large_and_factorials() {
        let mut f = 1.0f64;
        for n in 1..=30 {
            let g = gamma_real(n as f64 + 1.0).unwrap();
            f *= n as f64;
            assert!((g / f - 1.0).abs() < 1e-14, "n={n}");
        }
        // Γ(170.5) via Stirling with 1/(12x) corrections as an independent check
        let x = 170.5f64;
        let ln_stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * core::f64::consts::PI).ln()
            + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3));
        let (lg, _) = ln_gamma(x);
        assert!((lg - ln_stirling).abs() < 1e-13);
    }

    #[test]
    fn reciprocal_gamma_values() {
        assert_eq!(reciprocal_gamma(1.0), 1.0);
        assert_eq!(reciprocal_gamma(0.0), 0.0);
        assert_eq!(reciprocal_gamma(-2.0), 0.0);
        assert!((reciprocal_gamma(0.5) - 1.0 / SQRT_PI).abs() < 1e-16);
        assert!(reciprocal_gamma(300.0) >= 0.0 && reciprocal_gamma(300.0) < 1e-300);
    }

    #[test]
    fn hyp0f2_trivial() {
        let c = SeriesControl::default();
        assert_eq!(hyp0f2_reg(1.0, 1.0, 0.0, c).value, 1.0);
        let v = hyp0f2_reg(1.5, 2.0, 0.0, c).value;
        assert!((v - 1.128_379_167_095_512_6).abs() < 1e-15);
    }

    #[test]
    fn hyp0f2_against_long_sum() {
        // 200-term brute force with factorials built up directly
        let x = -2.0f64;
        let mut brute = 0.0;
        let mut fact = 1.0f64;
        for j in 0..200 {
            if j > 0 {
                fact *= j as f64;
            }
            let t = x.powi(j) / (fact * fact * fact);
            if !t.is_finite() {
                break;
            }
            brute += t;
        }
        let v = hyp0f2_reg(1.0, 1.0, x, SeriesControl::default());
        assert!(v.converged);
        assert!((v.value - brute).abs() < 1e-14);
    }

    #[test]
    fn hyp0f2_pole_parameters() {
        // b1 = -1: the j = 0, 1 terms vanish and the j = 2 term is x^2/2! · 1/Γ(1) · 1/Γ(b2+2)
        let c = SeriesControl::default();
        let x = 0.3;
        let v = hyp0f2_reg(-1.0, 0.5, x, c);
        let mut brute = 0.0;
        for j in 2..40 {
            let jf = j as f64;
            brute += x.powi(j) / gamma_real(jf + 1.0).unwrap() * reciprocal_gamma(-1.0 + jf)
                * reciprocal_gamma(0.5 + jf);
        }
        assert!(v.converged);
        assert!((v.value - brute).abs() < 1e-16);
    }

    #[test]
    fn hyp0f2_unregularized() {
        let c = SeriesControl::default();
        let v = hyp0f2(2.0, 3.0, 0.0, c).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(hyp0f2(-1.0, 2.0, 1.0, c).is_err());
    }

    #[test]
    fn wright_values() {
        let c = SeriesControl::default();
        assert_eq!(wright_bessel(1.0, 1.0, 0.0, c).unwrap().value, 1.0);
        let v = wright_bessel(0.5, 0.5, 0.0, c).unwrap().value;
        assert!((v - 0.564_189_583_547_756_3).abs() < 1e-15);
        let w = wright_bessel(1.0, 1.0, 1.0, c).unwrap();
        let j = bessel_j(0.0, 2.0, c).unwrap();
        assert!(w.converged && j.converged);
        assert!((w.value - j.value).abs() < 1e-13);
        assert!(wright_bessel(1.0, 0.0, 1.0, c).is_err());
    }

    #[test]
    fn wright_bessel_identity() {
        let c = SeriesControl::default();
        for &nu in &[0.0, 0.5, 1.0] {
            for k in 1..=20 {
                let x = 0.5 * k as f64;
                let w = wright_bessel(nu + 1.0, 1.0, x, c).unwrap().value;
                let j = bessel_j(nu, 2.0 * x.sqrt(), c).unwrap().value * x.powf(-nu / 2.0);
                assert!((w - j).abs() < 1e-12, "nu={nu} x={x}: {w} vs {j}");
            }
        }
    }

    #[test]
    fn bessel_values() {
        let c = SeriesControl::default();
        assert_eq!(bessel_j(0.0, 0.0, c).unwrap().value, 1.0);
        assert_eq!(bessel_j(1.0, 0.0, c).unwrap().value, 0.0);
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x
        for &x in &[0.3, 1.0, 4.0, 9.5] {
            let v = bessel_j(0.5, x, c).unwrap().value;
            let e = (2.0 / (core::f64::consts::PI * x)).sqrt() * x.sin();
            assert!((v - e).abs() < 5e-13, "x={x}: {v} vs {e}");
        }
        // J_{-1/2}(x) = sqrt(2/(pi x)) cos x
        let v = bessel_j(-0.5, 2.0, c).unwrap().value;
        let e = (1.0 / core::f64::consts::PI).sqrt() * 2.0f64.cos();
        assert!((v - e).abs() < 1e-14);
        assert!(bessel_j(0.0, 41.0, c).is_err());
        assert!(bessel_j(0.0, -1.0, c).is_err());
    }

    #[test]
    fn bessel_recurrence() {
        // J_{v-1} + J_{v+1} = (2v/x) J_v
        let c = SeriesControl::default();
        for &x in &[0.7, 3.0, 8.0] {
            for &v in &[0.5, 1.0, 2.3] {
                let a = bessel_j(v - 1.0, x, c).unwrap().value;
                let b = bessel_j(v + 1.0, x, c).unwrap().value;
                let m = bessel_j(v, x, c).unwrap().value;
                assert!((a + b - 2.0 * v / x * m).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn symmetric_polys() {
        assert_eq!(elementary_symmetric(&[0.0, -0.5, 0.0]), alloc::vec![-0.5, 0.0, 0.0]);
        assert_eq!(elementary_symmetric(&[0.0, 1.0, 2.0]), alloc::vec![3.0, 2.0, 0.0]);
        assert_eq!(elementary_symmetric(&[1.7]), alloc::vec![1.7]);
    }

    #[test]
    fn control_validation() {
        assert!(SeriesControl::new(0, 1e-10).is_err());
        assert!(SeriesControl::new(5, 0.0).is_err());
        assert!(SeriesControl::new(5, 1e-10).is_ok());
    }

    fn near_pole(x: f64) -> bool {
        x <= 0.0 && (x - x.round()).abs() < 1e-3
    }

    proptest! {
        #[test]
        fn rgamma_times_gamma(x in -10.0f64..10.0) {
            prop_assume!(!near_pole(x));
            let p = reciprocal_gamma(x) * gamma_real(x).unwrap();
            prop_assert!((p - 1.0).abs() < 1e-13);
        }

        #[test]
        fn hyp0f2_symmetric(b1 in -3.0f64..4.0, b2 in -3.0f64..4.0, x in -20.0f64..20.0) {
            let c = SeriesControl::default();
            let a = hyp0f2_reg(b1, b2, x, c);
            let b = hyp0f2_reg(b2, b1, x, c);
            // the swap reorders every product and recurrence; allow rounding growth over the terms
            let tol = a.terms as f64 * 4.0 * f64::EPSILON * a.max_term.max(1e-300);
            prop_assert!((a.value - b.value).abs() <= tol, "{} vs {} (tol {tol:e}, {} terms)", a.value, b.value, a.terms);
        }

        #[test]
        fn tail_bound(b1 in 0.1f64..4.0, b2 in 0.1f64..4.0, x in -30.0f64..30.0) {
            let c = SeriesControl::default();
            let v = hyp0f2_reg(b1, b2, x, c);
            if v.converged {
                let scale = v.value.abs().max(v.max_term * f64::EPSILON);
                prop_assert!(v.tail <= c.tail_tol * scale);
            }
        }

        #[test]
        fn wright_matches_bessel(nu in 0.0f64..2.0, x in 0.01f64..10.0) {
            let c = SeriesControl::default();
            let w = wright_bessel(nu + 1.0, 1.0, x, c).unwrap().value;
            let j = bessel_j(nu, 2.0 * x.sqrt(), c).unwrap().value * x.powf(-nu / 2.0);
            prop_assert!((w - j).abs() < 1e-12);
        }
    }
}
