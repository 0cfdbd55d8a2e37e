//! Taylor jets of a trajectory point, computed by feeding truncated power
//! series through the ODE right-hand side.

use alloc::vec;
use alloc::vec::Vec;

use crate::flow::HamiltonianState;
use crate::kernels::HardEdgeParams;
use crate::sigma::radical_f;
use crate::{Complex64, Error, Result};

type C = Complex64;

/// Truncated power series in `h = t - s`.
#[derive(Debug, Clone, PartialEq)]
struct Ps(Vec<C>);

impl Ps {
    fn zero(n: usize) -> Self {
        Ps(vec![C::new(0.0, 0.0); n])
    }

    fn mul(&self, o: &Ps) -> Ps {
        let n = self.0.len();
        let mut c = Ps::zero(n);
        for i in 0..n {
            for j in 0..n - i {
                c.0[i + j] += self.0[i] * o.0[j];
            }
        }
        c
    }

    fn add(&self, o: &Ps) -> Ps {
        Ps(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn sub(&self, o: &Ps) -> Ps {
        Ps(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    fn neg(&self) -> Ps {
        Ps(self.0.iter().map(|a| -a).collect())
    }
}

/// Number of Taylor coefficients kept; enough for a fourth derivative.
pub const JET_ORDER: usize = 6;

/// Taylor coefficients `c[i][k]` of every packed component about `st.s`.
pub fn taylor(st: &HamiltonianState, order: usize) -> Result<Vec<Vec<C>>> {
    if st.s <= 0.0 {
        return Err(Error::Domain("jet needs s > 0"));
    }
    let z0 = st.pack();
    let dim = z0.len();
    let mut coef: Vec<Ps> = z0
        .iter()
        .map(|&v| {
            let mut p = Ps::zero(order);
            p.0[0] = v;
            p
        })
        .collect();
    let mut inv = Ps::zero(order);
    let mut tser = Ps::zero(order);
    for k in 0..order {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        inv.0[k] = C::new(sign / libm::pow(st.s, k as f64 + 1.0), 0.0);
    }
    tser.0[0] = C::new(st.s, 0.0);
    if order > 1 {
        tser.0[1] = C::new(1.0, 0.0);
    }
    for k in 0..order - 1 {
        let d = rhs_series(st.m, &coef, &inv, &tser);
        for i in 0..dim {
            coef[i].0[k + 1] = d[i].0[k] / (k as f64 + 1.0);
        }
    }
    Ok(coef.into_iter().map(|p| p.0).collect())
}

fn rhs_series(m: usize, z: &[Ps], inv: &Ps, t: &Ps) -> Vec<Ps> {
    if m == 1 {
        let (x0, x1, y0, y1) = (&z[0], &z[1], &z[2], &z[3]);
        let (xi0, xi1, e0, e1) = (&z[4], &z[5], &z[6], &z[7]);
        return vec![
            inv.mul(&e0.mul(x0).neg().sub(x1)),
            inv.mul(&e1.mul(x0).neg().add(&t.mul(x0)).add(&xi0.mul(x0)).add(&xi1.mul(x1))),
            inv.mul(&xi0.mul(y1).neg().sub(&t.mul(y1)).add(&e0.mul(y0)).add(&e1.mul(y1))),
            inv.mul(&xi1.mul(y1).neg().add(y0)),
            x0.mul(y0),
            x0.mul(y1),
            x0.mul(y1),
            x1.mul(y1),
        ];
    }
    let (x, y, xi, eta) = (&z[0..3], &z[3..6], &z[6..9], &z[9..12]);
    vec![
        inv.mul(&eta[0].mul(&x[0]).neg().sub(&x[1])),
        inv.mul(&eta[1].mul(&x[0]).neg().sub(&x[2])),
        inv.mul(
            &eta[2]
                .mul(&x[0])
                .neg()
                .sub(&t.mul(&x[0]))
                .add(&xi[0].mul(&x[0]))
                .add(&xi[1].mul(&x[1]))
                .add(&xi[2].mul(&x[2])),
        ),
        inv.mul(
            &xi[0]
                .mul(&y[2])
                .neg()
                .add(&t.mul(&y[2]))
                .add(&eta[0].mul(&y[0]))
                .add(&eta[1].mul(&y[1]))
                .add(&eta[2].mul(&y[2])),
        ),
        inv.mul(&xi[1].mul(&y[2]).neg().add(&y[0])),
        inv.mul(&xi[2].mul(&y[2]).neg().add(&y[1])),
        x[0].mul(&y[0]).neg(),
        x[0].mul(&y[1]).neg(),
        x[0].mul(&y[2]).neg(),
        x[0].mul(&y[2]).neg(),
        x[1].mul(&y[2]).neg(),
        x[2].mul(&y[2]).neg(),
    ]
}

/// `eta_0` and its first four derivatives (complex, before leakage checks).
pub fn eta0_derivatives(st: &HamiltonianState) -> Result<[C; 5]> {
    let c = taylor(st, JET_ORDER)?;
    let idx = 3 * (st.m + 1);
    let mut d = [C::new(0.0, 0.0); 5];
    let mut fact = 1.0;
    for n in 0..5 {
        if n > 0 {
            fact *= n as f64;
        }
        d[n] = c[idx][n] * fact;
    }
    Ok(d)
}

/// `{eta_0, ..., eta_0''''}` with the auxiliary `F, U, V, W, Z, G` at `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventJet {
    pub s: f64,
    pub d: [f64; 5],
    pub f: f64,
    /// `s x_0 y_2'`
    pub u: f64,
    /// `s x_0' y_2`
    pub v: f64,
    /// `s^2 x_0 y_2''`
    pub w: f64,
    /// `s^2 x_0'' y_2`
    pub z: f64,
    /// `x_0 / y_2`
    pub g: f64,
    pub params: HardEdgeParams,
    /// Largest imaginary part discarded, relative to `1 + |value|`.
    pub leakage: f64,
}

impl ResolventJet {
    /// A jet from derivative data alone, with `U, V, W, Z` set from the
    /// sum/product relations and `G` unknown (NaN).
    pub fn from_derivatives(params: &HardEdgeParams, s: f64, d: [f64; 5]) -> Result<Self> {
        let f = radical_f(s, &d, params, None)?.formula;
        let (u, v, w, z) = crate::sigma::uvwz(s, &d, params.ek(1), params.ek(2), f)?;
        Ok(Self { s, d, f, u, v, w, z, g: f64::NAN, params: params.clone(), leakage: 0.0 })
    }
}

fn leak(v: C) -> f64 {
    v.im.abs() / (1.0 + v.re.abs())
}

/// Analytic derivative stack of `eta_0` for `M = 2`.
pub fn eta_derivatives(params: &HardEdgeParams, st: &HamiltonianState) -> Result<ResolventJet> {
    if st.m != 2 {
        return Err(Error::Domain("resolvent jet is defined for M = 2"));
    }
    let c = taylor(st, JET_ORDER)?;
    let mut d = [0.0; 5];
    let mut leakage = 0.0f64;
    let mut fact = 1.0;
    for n in 0..5 {
        if n > 0 {
            fact *= n as f64;
        }
        let v = c[9][n] * fact;
        leakage = leakage.max(leak(v));
        d[n] = v.re;
    }
    if d[1] == 0.0 || (st.x[0] * st.y[2]).norm() == 0.0 {
        return Err(Error::Domain("eta_0' vanishes"));
    }
    let s = st.s;
    let (x0, x0p, x0pp) = (c[0][0], c[0][1], c[0][2] * 2.0);
    let (y2, y2p, y2pp) = (c[5][0], c[5][1], c[5][2] * 2.0);
    let u = x0 * y2p * s;
    let v = x0p * y2 * s;
    let w = x0 * y2pp * (s * s);
    let z = x0pp * y2 * (s * s);
    let g = x0 / y2;
    for q in [u, v, w, z, g] {
        leakage = leakage.max(leak(q));
    }
    let f = radical_f(s, &d, params, None)?.formula;
    Ok(ResolventJet {
        s,
        d,
        f,
        u: u.re,
        v: v.re,
        w: w.re,
        z: z.re,
        g: g.re,
        params: params.clone(),
        leakage,
    })
}
