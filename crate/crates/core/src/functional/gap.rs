//! The functional equation `𝓕(y) = 𝓕(Id)` with `(𝓕y)(z) = Π (y(z) - y(z_i))`,
//! and the lower bound that separates `y = z` from nearby candidates.

use num_complex::Complex64;
use serde::Serialize;

use super::{
    check_vanishes, delta, difference_quotient, quadratic_constant, stability_constant,
    FunctionalError, RootConfig,
};
use crate::series::{circle_min, circle_norm, UniSeries};

/// Relative slack applied to sampled-norm inequalities.
pub const GAP_SLACK: f64 = 0.01;

/// `‖Π (z - z_i) - Π (y(z) - y(z_i))‖_r`, sampled.
pub fn functional_residual(y: &UniSeries, config: &RootConfig) -> Result<f64, FunctionalError> {
    check_vanishes(y)?;
    let images: Vec<Complex64> = config.roots.iter().map(|&z| y.eval(z)).collect();
    let g = |z: Complex64| {
        let yz = y.eval(z);
        config.p(z) - images.iter().map(|w| yz - w).product::<Complex64>()
    };
    Ok(circle_norm(&g, config.disk.radius, config.disk.samples))
}

/// Quantities of the gap inequality
/// `‖𝓕(y) - 𝓕(Id)‖_r >= inf|p| · (k c ‖f‖_r - C_k ‖f‖_r^2)`, `f = y - Id`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub lhs: f64,
    pub rhs_bound: f64,
    pub c: f64,
    pub delta: f64,
    pub f_norm: f64,
    pub inf_p: f64,
    pub c_k: f64,
    /// `lhs >= rhs_bound · (1 - slack)`, and `lhs > 0` unless `f = 0`.
    pub verdict: bool,
    /// `0 < ‖f‖_r <= delta` with a positive bound that the residual meets.
    pub certified: bool,
}

pub fn identity_gap(y: &UniSeries, config: &RootConfig) -> Result<GapReport, FunctionalError> {
    let lhs = functional_residual(y, config)?;
    let r = config.disk.radius;
    let samples = config.disk.samples;
    let f = y - &UniSeries::identity(y.trunc());
    let f_norm = circle_norm(&f, r, samples);
    let inf_p = circle_min(|z| config.p(z).norm(), r, samples);
    let c = stability_constant(config);
    let k = config.k() as f64;
    let c_k = quadratic_constant(config.k(), config.rho, r);
    let rhs_bound = inf_p * (k * c * f_norm - c_k * f_norm * f_norm);
    let delta = delta(config, c);
    let verdict = lhs >= rhs_bound * (1.0 - GAP_SLACK) && (f_norm == 0.0 || lhs > 0.0);
    let certified = verdict && f_norm > 0.0 && f_norm <= delta && rhs_bound > 0.0;
    Ok(GapReport {
        lhs,
        rhs_bound,
        c,
        delta,
        f_norm,
        inf_p,
        c_k,
        verdict,
        certified,
    })
}

/// Coefficientwise gap between `𝓕(f + Id) - 𝓕(Id)` and
/// `p · Σ_{J ≠ ∅} Π_{j∈J} (f(z) - f(z_j))/(z - z_j)`, computed exactly on
/// the polynomial `f`.
pub fn expansion_identity_gap(f: &UniSeries, config: &RootConfig) -> Result<f64, FunctionalError> {
    check_vanishes(f)?;
    let k = config.k();
    let n = f.trunc().max(1) * k + k;
    let f = f.with_trunc(n);
    let one = UniSeries::constant(n, Complex64::new(1.0, 0.0));
    let y = &f + &UniSeries::identity(n);

    let mut lhs = one.clone();
    for &zj in &config.roots {
        lhs = lhs.mul_trunc(&(&y - &one.scale(y.eval(zj))), n);
    }
    let p = UniSeries::new(config.p_coeffs()).with_trunc(n);
    lhs = &lhs - &p;

    let quotients: Vec<UniSeries> = config
        .roots
        .iter()
        .map(|&zj| difference_quotient(&f, zj).with_trunc(n))
        .collect();
    let mut sum = UniSeries::zero(n);
    for mask in 1u32..(1 << k) {
        let mut term = one.clone();
        for (j, q) in quotients.iter().enumerate() {
            if mask & (1 << j) != 0 {
                term = term.mul_trunc(q, n);
            }
        }
        sum = &sum + &term;
    }
    Ok(lhs.max_abs_diff(&p.mul_trunc(&sum, n)))
}
