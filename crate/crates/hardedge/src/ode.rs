//! Adaptive Dormand–Prince 8(5,3) integrator on complex state vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Complex64, Error, Result};

pub(crate) const C: [f64; 12] = [0.0, 0.05260015195876773, 0.0789002279381516, 0.1183503419072274, 0.2816496580927726, 0.3333333333333333, 0.25, 0.3076923076923077, 0.6512820512820513, 0.6, 0.8571428571428571, 1.0];
pub(crate) const A: [[f64; 12]; 12] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03709200011850479, 0.0, 0.0, 0.17038392571223998, 0.10726203044637328, -0.015319437748624402, 0.008273789163814023, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6241109587160757, 0.0, 0.0, -3.3608926294469414, -0.868219346841726, 27.59209969944671, 20.154067550477894, -43.48988418106996, 0.0, 0.0, 0.0, 0.0],
    [0.47766253643826434, 0.0, 0.0, -2.4881146199716677, -0.590290826836843, 21.230051448181193, 15.279233632882423, -33.28821096898486, -0.020331201708508627, 0.0, 0.0, 0.0],
    [-0.9371424300859873, 0.0, 0.0, 5.186372428844064, 1.0914373489967295, -8.149787010746927, -18.52006565999696, 22.739487099350505, 2.4936055526796523, -3.0467644718982196, 0.0, 0.0],
    [2.273310147516538, 0.0, 0.0, -10.53449546673725, -2.0008720582248625, -17.9589318631188, 27.94888452941996, -2.8589982771350235, -8.87285693353063, 12.360567175794303, 0.6433927460157636, 0.0],
];
pub(crate) const B: [f64; 12] = [0.054293734116568765, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, 0.3111643669578199, -0.1521609496625161, 0.20136540080403034, 0.04471061572777259];
pub(crate) const E3: [f64; 13] = [-0.18980075407240762, 0.0, 0.0, 0.0, 0.0, 4.450312892752409, 1.8915178993145003, -5.801203960010585, -0.4226823213237919, -0.1521609496625161, 0.20136540080403034, 0.02265179219836082, 0.0];
pub(crate) const E5: [f64; 13] = [0.01312004499419488, 0.0, 0.0, 0.0, 0.0, -1.2251564463762044, -0.4957589496572502, 1.6643771824549864, -0.35032884874997366, 0.3341791187130175, 0.08192320648511571, -0.022355307863886294, 0.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Smallest relative step `|h| / |t|` before giving up.
    pub min_rel_step: f64,
    /// Reject a step whose monitored drift exceeds this (absent: no monitor).
    pub drift_limit: Option<f64>,
}

impl OdeOptions {
    pub fn new(tol: f64) -> Self {
        Self { rtol: tol, atol: tol * 1e-2, max_steps: 200_000, min_rel_step: 1e-14, drift_limit: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub drift_rejections: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<Complex64>>,
    pub stats: OdeStats,
}

fn rms_scaled(v: &[Complex64], scale: &[f64]) -> f64 {
    let s: f64 = v.iter().zip(scale).map(|(a, w)| { let r = a.norm() / w; r * r }).sum();
    libm::sqrt(s / v.len() as f64)
}

/// Integrate `y' = f(t, y)` from `t0` through each of `targets` (increasing,
/// all beyond `t0`), landing on every target exactly by clamping the step.
///
/// `drift` maps a state to `(index, value)` of its worst monitored quantity;
/// when `opts.drift_limit` is set a step that pushes the value past the limit
/// is rejected and the tolerances are tightened.
pub fn integrate<F, D>(
    mut f: F,
    t0: f64,
    y0: &[Complex64],
    targets: &[f64],
    opts: OdeOptions,
    mut drift: D,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
    D: FnMut(f64, &[Complex64]) -> (usize, f64),
{
    let n = y0.len();
    if targets.is_empty() || targets[0] <= t0 || targets.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("targets must increase strictly beyond t0"));
    }
    let mut rtol = opts.rtol;
    let mut atol = opts.atol;
    let mut stats = OdeStats::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 13];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let mut ynew = vec![Complex64::new(0.0, 0.0); n];
    let mut scale = vec![0.0; n];

    f(t, &y, &mut k[0])?;
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, t, &y, &k[0], rtol, atol, &mut stats)?;
    let mut out_t = Vec::with_capacity(targets.len());
    let mut out_y = Vec::with_capacity(targets.len());
    let mut steps = 0;

    for &target in targets {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::TooManySteps { s: t });
            }
            let remaining = target - t;
            let clamped = h >= remaining;
            let hs = if clamped { remaining } else { h.min(remaining) };
            // a short step forced by a nearby target is fine; only adaptive shrinkage underflows
            if !clamped && hs < opts.min_rel_step * t.abs().max(1e-300) {
                return Err(Error::StepUnderflow { s: t });
            }
            for i in 1..12 {
                for c in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..i {
                        if A[i][j] != 0.0 {
                            acc += k[j][c] * A[i][j];
                        }
                    }
                    tmp[c] = y[c] + acc * hs;
                }
                f(t + C[i] * hs, &tmp, &mut k[i])?;
            }
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..12 {
                    if B[j] != 0.0 {
                        acc += k[j][c] * B[j];
                    }
                }
                ynew[c] = y[c] + acc * hs;
            }
            let tn = if clamped { target } else { t + hs };
            f(tn, &ynew, &mut k[12])?;
            stats.evaluations += 12;
            for c in 0..n {
                scale[c] = atol + rtol * y[c].norm().max(ynew[c].norm());
            }
            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for c in 0..n {
                let mut a5 = Complex64::new(0.0, 0.0);
                let mut a3 = Complex64::new(0.0, 0.0);
                for j in 0..13 {
                    a5 += k[j][c] * E5[j];
                    a3 += k[j][c] * E3[j];
                }
                let r5 = a5.norm() / scale[c];
                e5 += r5 * r5;
                let r3 = a3.norm() / scale[c];
                e3 += r3 * r3;
            }
            let denom = e5 + 0.01 * e3;
            let err = if denom > 0.0 { hs * e5 / libm::sqrt(denom * n as f64) } else { 0.0 };
            if !err.is_finite() {
                stats.rejected += 1;
                h = 0.2 * hs;
                continue;
            }
            if err <= 1.0 {
                if let Some(limit) = opts.drift_limit {
                    let (_, v) = drift(tn, &ynew);
                    if !(v <= limit) {
                        stats.drift_rejections += 1;
                        if rtol <= 1e-15 {
                            let (index, value) = drift(tn, &ynew);
                            return Err(Error::IntegralDrift { index, value });
                        }
                        rtol *= 0.25;
                        atol *= 0.25;
                        h = 0.5 * hs;
                        continue;
                    }
                }
                stats.accepted += 1;
                t = tn;
                core::mem::swap(&mut y, &mut ynew);
                k.swap(0, 12);
                let fac = if err == 0.0 { 10.0 } else { (0.9 * libm::pow(err, -1.0 / 8.0)).clamp(0.2, 10.0) };
                // a clamped step says nothing about the natural step size
                h = if clamped { h.max(hs * fac) } else { hs * fac };
            } else {
                stats.rejected += 1;
                h = hs * (0.9 * libm::pow(err, -1.0 / 8.0)).clamp(0.2, 1.0);
            }
        }
        out_t.push(t);
        out_y.push(y.clone());
    }
    Ok(OdeSolution { ts: out_t, ys: out_y, stats })
}

fn initial_step<F>(
    f: &mut F,
    t: f64,
    y: &[Complex64],
    f0: &[Complex64],
    rtol: f64,
    atol: f64,
    stats: &mut OdeStats,
) -> Result<f64>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    let scale: Vec<f64> = y.iter().map(|v| atol + rtol * v.norm()).collect();
    let d0 = rms_scaled(y, &scale);
    let d1 = rms_scaled(f0, &scale);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * t.abs().max(1e-6) } else { 0.01 * d0 / d1 };
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![Complex64::new(0.0, 0.0); y.len()];
    f(t + h0, &y1, &mut f1)?;
    stats.evaluations += 1;
    let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms_scaled(&diff, &scale) / h0;
    let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
        (1e-6f64).max(h0 * 1e-3)
    } else {
        libm::pow(0.01 / d1.max(d2), 1.0 / 8.0)
    };
    Ok((100.0 * h0).min(h1))
}
