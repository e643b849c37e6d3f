//! Uniqueness machinery for `Π (z - z_i) = Π (y(z) - y(z_i))`, `y(0) = 0`.
//!
//! * [`apply_l`] is the averaged difference quotient
//!   `(𝓛f)(z) = (1/k) Σ_j (f(z) - f(z_j)) / (z - z_j)` and [`apply_t`] its
//!   explicit inverse built from the coefficients of `1/A(z)`, where
//!   `A(z) = Σ α_n z^n`, `α_n = (1/k) Σ_j z_j^n`.
//! * [`stability_constant`] bounds `‖𝓛f‖_r / ‖f‖_r` from below.
//! * [`identity_gap`] turns that bound into a certificate that `y = z` is
//!   the only solution near the identity; [`containment_check`] relates root
//!   containment to the behaviour of `y` at the roots of `P` when
//!   `P = Q ∘ y`.

mod gap;
pub mod instances;
mod containment;

pub use gap::{expansion_identity_gap, functional_residual, identity_gap, GapReport, GAP_SLACK};
pub use containment::{containment_check, CheckOptions, Containment, ContainmentReport};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{circle_min, DiskSpec, SeriesError, UniSeries, DROP_TOL};

/// Circle samples used for the infimum in [`stability_constant`].
pub const STABILITY_SAMPLES: usize = 2048;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("need at least one root")]
    NoRoots,
    #[error("regime violation: need 2 rho < r < R, got rho = {rho}, r = {r}, R = {outer}")]
    Regime { rho: f64, r: f64, outer: f64 },
    #[error("series must vanish at 0, constant term is {0}")]
    NonzeroConstant(Complex64),
    #[error("alpha_0 must be 1, got {0}")]
    AlphaNormalization(Complex64),
    #[error("degree mismatch: deg P = {p}, deg Q = {q}")]
    DegreeMismatch { p: usize, q: usize },
    #[error("root {0} of P lies outside the disk")]
    RootOutsideDisk(Complex64),
    #[error("premise P = Q(y) violated: max coefficient gap {0:e}")]
    Premise(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Roots `z_1..z_k` with multiplicity, `rho = max |z_i|`, and the disk data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    pub roots: Vec<Complex64>,
    pub rho: f64,
    pub disk: DiskSpec,
}

impl RootConfig {
    /// Validates `k >= 1` and `2 rho < r < R`.
    pub fn new(roots: Vec<Complex64>, disk: DiskSpec) -> Result<Self, FunctionalError> {
        if roots.is_empty() {
            return Err(FunctionalError::NoRoots);
        }
        let rho = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(2.0 * rho < disk.radius && disk.radius < disk.outer) {
            return Err(FunctionalError::Regime {
                rho,
                r: disk.radius,
                outer: disk.outer,
            });
        }
        Ok(RootConfig { roots, rho, disk })
    }

    /// `k` roots drawn uniformly from the disk `|z| <= rho_max`.
    pub fn random<R: Rng>(rng: &mut R, k: usize, rho_max: f64, disk: DiskSpec) -> Result<Self, FunctionalError> {
        let roots = (0..k)
            .map(|_| {
                let radius = rho_max * rng.gen::<f64>().sqrt();
                Complex64::from_polar(radius, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Self::new(roots, disk)
    }

    pub fn k(&self) -> usize {
        self.roots.len()
    }

    /// `p(z) = Π (z - z_j)`.
    pub fn p(&self, z: Complex64) -> Complex64 {
        self.roots.iter().map(|zj| z - zj).product()
    }

    /// Coefficients of `p`, constant term first.
    pub fn p_coeffs(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &zj in &self.roots {
            let mut next = vec![Complex64::default(); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * zj;
            }
            c = next;
        }
        c
    }
}

/// `α_n = (1/k) Σ_j z_j^n` for `n = 0..=n_max`, with `0^0 = 1`.
pub fn alpha_coeffs(config: &RootConfig, n_max: usize) -> Vec<Complex64> {
    let k = config.k() as f64;
    let mut powers = vec![Complex64::new(1.0, 0.0); config.k()];
    let mut out = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        out.push(powers.iter().sum::<Complex64>() / k);
        for (p, z) in powers.iter_mut().zip(&config.roots) {
            *p *= z;
        }
    }
    out
}

/// Coefficients of `1/A(z)`: `β_0 = 1`, `β_n = -Σ_{j=1}^n α_j β_{n-j}`.
pub fn beta_coeffs(alphas: &[Complex64]) -> Result<Vec<Complex64>, FunctionalError> {
    let one = Complex64::new(1.0, 0.0);
    match alphas.first() {
        Some(&a0) if (a0 - one).norm() <= 1e-14 => {}
        Some(&a0) => return Err(FunctionalError::AlphaNormalization(a0)),
        None => return Ok(Vec::new()),
    }
    let mut beta = vec![one];
    for n in 1..alphas.len() {
        let s: Complex64 = (1..=n).map(|j| alphas[j] * beta[n - j]).sum();
        beta.push(-s);
    }
    Ok(beta)
}

/// `(f(z) - f(a)) / (z - a)` by synthetic division; truncated one order lower.
pub fn difference_quotient(f: &UniSeries, a: Complex64) -> UniSeries {
    let c = f.coeffs();
    let n = f.trunc();
    if n == 0 {
        return UniSeries::zero(0);
    }
    let mut q = vec![Complex64::default(); n];
    q[n - 1] = c[n];
    for i in (1..n).rev() {
        q[i - 1] = c[i] + a * q[i];
    }
    UniSeries::new(q)
}

fn check_vanishes(f: &UniSeries) -> Result<(), FunctionalError> {
    let f0 = f.coeff(0);
    if f0.norm() > DROP_TOL {
        return Err(FunctionalError::NonzeroConstant(f0));
    }
    Ok(())
}

/// `(𝓛f)(z) = (1/k) Σ_j (f(z) - f(z_j)) / (z - z_j)` for `f(0) = 0`.
pub fn apply_l(f: &UniSeries, config: &RootConfig) -> Result<UniSeries, FunctionalError> {
    check_vanishes(f)?;
    let n = f.trunc().saturating_sub(1);
    let mut acc = UniSeries::zero(n);
    for &zj in &config.roots {
        acc = &acc + &difference_quotient(f, zj);
    }
    Ok(acc.scale(Complex64::new(1.0 / config.k() as f64, 0.0)))
}

/// `(𝓣f)(z) = z Σ_j {Σ_{l>=j} f_l β_{l-j}} z^j`, truncated at `trunc`.
pub fn apply_t(f: &UniSeries, config: &RootConfig, trunc: usize) -> UniSeries {
    let m = f.trunc();
    let beta = beta_coeffs(&alpha_coeffs(config, m)).expect("alpha_0 = 1 by construction");
    let mut out = vec![Complex64::default(); trunc + 1];
    for j in 0..trunc.min(m + 1) {
        out[j + 1] = (j..=m).map(|l| f.coeff(l) * beta[l - j]).sum();
    }
    UniSeries::new(out)
}

/// `max |p'_n - [z^n] Σ_j p(z)/(z - z_j)|`, which vanishes by the logarithmic
/// derivative identity.
pub fn p_prime_gap(config: &RootConfig) -> f64 {
    let c = config.p_coeffs();
    let p = UniSeries::new(c.clone());
    let dp = p.derivative();
    let mut sum = UniSeries::zero(dp.trunc());
    for &zj in &config.roots {
        sum = &sum + &difference_quotient(&p, zj);
    }
    dp.max_abs_diff(&sum)
}

/// `inf_{|z|=r} |(1/k) Σ_j 1/(z - z_j)|`, sampled and refined.
pub fn mean_resolvent_inf(config: &RootConfig) -> f64 {
    let k = config.k() as f64;
    circle_min(
        |z| (config.roots.iter().map(|zj| (z - zj).inv()).sum::<Complex64>() / k).norm(),
        config.disk.radius,
        STABILITY_SAMPLES.max(config.disk.samples),
    )
}

/// `{1 + (ρ/r) / (1 - 2ρ/r)^3}^{-1}`.
pub fn stability_factor(rho: f64, r: f64) -> f64 {
    let s = rho / r;
    1.0 / (1.0 + s / (1.0 - 2.0 * s).powi(3))
}

/// Configuration-specific stability constant
/// `c = inf_{|z|=r} |(1/k) Σ 1/(z - z_j)| · {1 + (ρ/r)/(1 - 2ρ/r)^3}^{-1}`.
pub fn stability_constant(config: &RootConfig) -> f64 {
    mean_resolvent_inf(config) * stability_factor(config.rho, config.disk.radius)
}

/// Estimate of the minimum of the stability constant over all `k`-tuples
/// with `max |z_i| <= rho`: random tuples plus all roots stacked on the
/// boundary circle, each evaluated with the common factor for `rho`.
pub fn stability_constant_min<R: Rng>(
    rng: &mut R,
    k: usize,
    rho: f64,
    disk: DiskSpec,
    trials: usize,
) -> Result<f64, FunctionalError> {
    let factor = stability_factor(rho, disk.radius);
    let stacked = RootConfig::new(vec![Complex64::new(rho, 0.0); k], disk)?;
    let mut best = mean_resolvent_inf(&stacked);
    for _ in 0..trials {
        let cfg = RootConfig::random(rng, k, rho, disk)?;
        best = best.min(mean_resolvent_inf(&cfg));
    }
    Ok(best * factor)
}

/// Quadratic-term constant `(1 + 2/(r - ρ))^k`.
pub fn quadratic_constant(k: usize, rho: f64, r: f64) -> f64 {
    (1.0 + 2.0 / (r - rho)).powi(k as i32)
}

/// The cruder `(1 + 2/ρ)^k`; infinite at `ρ = 0`.
pub fn crude_quadratic_constant(k: usize, rho: f64) -> f64 {
    (1.0 + 2.0 / rho).powi(k as i32)
}

/// Admissible perturbation size `min{1, k c / C_k}`.
pub fn delta(config: &RootConfig, c: f64) -> f64 {
    let ck = quadratic_constant(config.k(), config.rho, config.disk.radius);
    (config.k() as f64 * c / ck).min(1.0)
}
