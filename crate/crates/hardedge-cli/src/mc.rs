//! Monte Carlo sampling of the smallest squared singular value of
//! `Y_M = X(M) ... X(1)` for rectangular complex Ginibre factors.
//!
//! RNG: ChaCha12, seeded from the 64-bit run seed; sample `i` draws from
//! stream `i`, so results do not depend on thread scheduling.

use nalgebra::{Complex, DMatrix};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub const MAX_N0: usize = 512;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    /// `E|g|^2 = 1`: real and imaginary parts each have variance 1/2.
    UnitTotal,
    /// Real and imaginary parts each standard normal; `lambda_min` is divided
    /// by `2^M` afterwards so both conventions target the same limit.
    UnitComponent,
}

impl Variance {
    pub fn name(self) -> &'static str {
        match self {
            Variance::UnitTotal => "unit_total",
            Variance::UnitComponent => "unit_component",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "unit_total" => Ok(Variance::UnitTotal),
            "unit_component" => Ok(Variance::UnitComponent),
            _ => Err(CliError::Usage(format!("unknown variance convention {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub m: usize,
    pub n0: usize,
    /// `(nu_1, ..., nu_M)`
    pub nu: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub variance: Variance,
}

impl McConfig {
    pub fn new(m: usize, n0: usize, nu: Vec<usize>, samples: usize, seed: u64) -> Self {
        Self { m, n0, nu, samples, seed, variance: Variance::UnitTotal }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.m == 0 {
            return Err(CliError::Usage("M must be at least 1".into()));
        }
        if self.n0 == 0 {
            return Err(CliError::Usage("N0 must be at least 1".into()));
        }
        if self.n0 > MAX_N0 {
            return Err(CliError::Usage(format!("N0 = {} exceeds the size guard {MAX_N0}", self.n0)));
        }
        if self.nu.len() != self.m {
            return Err(CliError::Usage(format!("expected {} values of nu, got {}", self.m, self.nu.len())));
        }
        if self.nu.iter().any(|&v| self.n0 + v > MAX_N0) {
            return Err(CliError::Usage(format!("N0 + nu exceeds the size guard {MAX_N0}")));
        }
        if self.samples == 0 {
            return Err(CliError::Usage("samples must be at least 1".into()));
        }
        Ok(())
    }

    /// `N_0, N_1, ..., N_M`
    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.n0).chain(self.nu.iter().map(|&v| self.n0 + v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub config: McConfig,
    /// Indexed by sample.
    pub lambda_min: Vec<f64>,
    /// True when the `2^M` factor of `UnitComponent` has been applied.
    pub scaled: bool,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

fn ginibre(rows: usize, cols: usize, sd: f64, rng: &mut ChaCha12Rng) -> DMatrix<Complex<f64>> {
    // column-major fill, real part then imaginary part
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(sd * re, sd * im)
    })
}

fn sample_one(cfg: &McConfig, dims: &[usize], index: u64) -> f64 {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let sd = match cfg.variance {
        Variance::UnitTotal => std::f64::consts::FRAC_1_SQRT_2,
        Variance::UnitComponent => 1.0,
    };
    let mut y = ginibre(dims[1], dims[0], sd, &mut rng);
    for m in 2..dims.len() {
        y = ginibre(dims[m], dims[m - 1], sd, &mut rng) * y;
    }
    let gram = y.adjoint() * &y;
    let lam = gram.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    match cfg.variance {
        Variance::UnitTotal => lam,
        Variance::UnitComponent => lam / f64::powi(2.0, cfg.m as i32),
    }
}

/// Draw `cfg.samples` values of the smallest eigenvalue of `Y_M^† Y_M`.
pub fn sample_min_singular_sq(cfg: &McConfig) -> CliResult<McResult> {
    cfg.validate()?;
    let dims = cfg.dims();
    let lambda_min: Vec<f64> =
        (0..cfg.samples as u64).into_par_iter().map(|i| sample_one(cfg, &dims, i)).collect();
    if let Some(i) = lambda_min.iter().position(|&l| !(l > 0.0)) {
        return Err(CliError::Acceptance(format!("sample {i} produced a non-positive smallest eigenvalue")));
    }
    let n = lambda_min.len() as f64;
    let mean = lambda_min.iter().sum::<f64>() / n;
    let var = if lambda_min.len() > 1 {
        lambda_min.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(McResult {
        config: cfg.clone(),
        min: lambda_min.iter().copied().fold(f64::INFINITY, f64::min),
        max: lambda_min.iter().copied().fold(0.0, f64::max),
        lambda_min,
        scaled: cfg.variance == Variance::UnitComponent,
        mean,
        std_dev: var.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub s: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let mid = (p + z2 / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    ((mid - half).max(0.0), (mid + half).min(1.0))
}

/// `P(lambda_min > s / N0)` with a Wilson 99% interval at each `s`.
pub fn empirical_gap(result: &McResult, s_grid: &[f64], n0: usize) -> CliResult<Vec<GapRow>> {
    let n = result.lambda_min.len();
    if n == 0 {
        return Err(CliError::Usage("no samples".into()));
    }
    let mut sorted = result.lambda_min.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(s_grid
        .iter()
        .map(|&s| {
            let t = s / n0 as f64;
            let k = n - sorted.partition_point(|&l| l <= t);
            let (ci_low, ci_high) = wilson(k, n, Z99);
            GapRow { s, p_hat: k as f64 / n as f64, ci_low, ci_high }
        })
        .collect())
}

/// Binomial standard error at probability `p`.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `|p1 - p2|` in units of the joint binomial standard error.
pub fn joint_sigma_distance(p1: f64, n1: usize, p2: f64, n2: usize) -> f64 {
    let se = (binomial_se(p1, n1).powi(2) + binomial_se(p2, n2).powi(2)).sqrt();
    if se == 0.0 {
        return if p1 == p2 { 0.0 } else { f64::INFINITY };
    }
    (p1 - p2).abs() / se
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// `N0 * lambda_min`, the hard-edge scaled sample.
pub fn scaled_samples(result: &McResult) -> Vec<f64> {
    let n0 = result.config.n0 as f64;
    result.lambda_min.iter().map(|l| l * n0).collect()
}
