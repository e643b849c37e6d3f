//! Coefficients `[z^{n_0}] Π f_i(z)^{n_i}` of mixed-power generating functions.
//!
//! A direction `(t_0, t) = (n_0, n) / ‖(n_0, n)‖_1` picks a critical point
//! `x > 0` with `t_0 = Σ t_i x f_i'(x)/f_i(x)`. Cauchy's formula on `|z| = x`
//! then gives the coefficient exactly as
//!
//! ```text
//! x^{-n_0}/(2π) · Π f_i(x)^{n_i} · ∫_{-π}^{π} exp{-‖(n_0, n)‖ F(θ)} dθ
//! F(θ) = i t_0 θ - Σ t_i [log f_i(x e^{iθ}) - log f_i(x)]
//! ```
//!
//! which [`estimate_coefficient`] evaluates by the trapezoid rule, alongside
//! the Gaussian approximation of the integral and the exact coefficient from
//! truncated powering.

mod saddle;
mod sweep;

pub use saddle::{estimate_coefficient, exact_coefficient, phase_function, EstimateReport};
pub use sweep::{sweep, SweepPoint, SweepReport};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{SeriesError, SeriesJson, UniSeries, DROP_TOL};

/// Largest critical point the bracket search will consider.
pub const X_CAP: f64 = 1e6;
/// Minimality needs every sampled ratio below 1 by at least this (in log scale).
pub const MIN_MARGIN: f64 = 1e-12;
pub const MAX_EXPONENT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixedError {
    #[error("need at least one factor")]
    NoFactors,
    #[error("{factors} factors but {weights} weights")]
    WeightCount { factors: usize, weights: usize },
    #[error("exponent {0} exceeds {MAX_EXPONENT}")]
    ExponentTooLarge(u64),
    #[error("factor {0} has vanishing constant term")]
    ZeroConstant(usize),
    #[error("factor {0} has non-real coefficients")]
    NonRealFactor(usize),
    #[error("radius of factor {index} must be positive, got {radius}")]
    BadRadius { index: usize, radius: f64 },
    #[error("invalid direction: {0}")]
    InvalidDirection(String),
    #[error("t0 = 0: the critical point degenerates to x = 0")]
    DegenerateBoundary,
    #[error("direction outside admissible cone: no critical point below {0}")]
    OutsideCone(f64),
    #[error("critical point is not strictly minimal (margin {0:e})")]
    NonMinimal(f64),
    #[error("factor {index} vanishes on the circle near theta = {theta}")]
    BranchTracking { index: usize, theta: f64 },
    #[error("quadrature did not converge: node halving changed the integral by {0:e}")]
    QuadratureNotConverged(f64),
    #[error("factor {index} known to order {have}, coefficient {needed} requested")]
    TruncationShortfall { index: usize, needed: usize, have: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Factors `f_1..f_d`, exponents `n_1..n_d` and target power `n_0`.
///
/// `radii` bounds where each truncated factor is trusted; it defaults to
/// infinity, i.e. the stored coefficients are taken as a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSystem {
    pub factors: Vec<UniSeries>,
    pub weights: Vec<u64>,
    pub n0: u64,
    pub radii: Vec<f64>,
}

impl FactorSystem {
    pub fn new(factors: Vec<UniSeries>, weights: Vec<u64>, n0: u64) -> Result<Self, MixedError> {
        let radii = vec![f64::INFINITY; factors.len()];
        Self::with_radii(factors, weights, n0, radii)
    }

    pub fn with_radii(
        factors: Vec<UniSeries>,
        weights: Vec<u64>,
        n0: u64,
        radii: Vec<f64>,
    ) -> Result<Self, MixedError> {
        if factors.is_empty() {
            return Err(MixedError::NoFactors);
        }
        if factors.len() != weights.len() || factors.len() != radii.len() {
            return Err(MixedError::WeightCount {
                factors: factors.len(),
                weights: weights.len(),
            });
        }
        if let Some(&e) = weights.iter().chain([&n0]).find(|&&e| e > MAX_EXPONENT) {
            return Err(MixedError::ExponentTooLarge(e));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.coeff(0).norm() <= DROP_TOL {
                return Err(MixedError::ZeroConstant(i));
            }
            if radii[i].is_nan() || radii[i] <= 0.0 {
                return Err(MixedError::BadRadius { index: i, radius: radii[i] });
            }
        }
        Ok(FactorSystem { factors, weights, n0, radii })
    }

    pub fn d(&self) -> usize {
        self.factors.len()
    }

    /// `‖(n_0, n)‖_1`.
    pub fn norm(&self) -> u64 {
        self.n0 + self.weights.iter().sum::<u64>()
    }

    pub fn direction(&self) -> Result<Direction, MixedError> {
        Direction::from_counts(self.n0, &self.weights)
    }

    fn check_real(&self) -> Result<(), MixedError> {
        for (i, f) in self.factors.iter().enumerate() {
            if f.coeffs().iter().any(|c| c.im.abs() > DROP_TOL) {
                return Err(MixedError::NonRealFactor(i));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> FactorSystemJson {
        FactorSystemJson {
            factors: self.factors.iter().map(SeriesJson::from).collect(),
            weights: self.weights.clone(),
            n0: self.n0,
            radii: self
                .radii
                .iter()
                .any(|r| r.is_finite())
                .then(|| self.radii.iter().map(|r| r.is_finite().then_some(*r)).collect()),
        }
    }
}

/// Wire form; a `null` radius means unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSystemJson {
    pub factors: Vec<SeriesJson>,
    pub weights: Vec<u64>,
    pub n0: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<Option<f64>>>,
}

impl FactorSystemJson {
    pub fn to_system(&self) -> Result<FactorSystem, MixedError> {
        let factors = self
            .factors
            .iter()
            .map(SeriesJson::to_uni)
            .collect::<Result<Vec<_>, _>>()?;
        let radii = match &self.radii {
            Some(r) => r.iter().map(|x| x.unwrap_or(f64::INFINITY)).collect(),
            None => vec![f64::INFINITY; factors.len()],
        };
        FactorSystem::with_radii(factors, self.weights.clone(), self.n0, radii)
    }
}

/// `(t_0, t)` with nonnegative entries summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub t0: f64,
    pub t: Vec<f64>,
}

impl Direction {
    pub fn new(t0: f64, t: Vec<f64>) -> Result<Self, MixedError> {
        if t0 < 0.0 || t.iter().any(|&x| x.is_nan() || x < 0.0) || !t0.is_finite() {
            return Err(MixedError::InvalidDirection("entries must be nonnegative".into()));
        }
        let sum = t0 + t.iter().sum::<f64>();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(MixedError::InvalidDirection(format!("1-norm is {sum}, expected 1")));
        }
        Ok(Direction { t0, t })
    }

    pub fn from_counts(n0: u64, n: &[u64]) -> Result<Self, MixedError> {
        let total = (n0 + n.iter().sum::<u64>()) as f64;
        if total == 0.0 {
            return Err(MixedError::InvalidDirection("all counts are zero".into()));
        }
        Ok(Direction {
            t0: n0 as f64 / total,
            t: n.iter().map(|&x| x as f64 / total).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub direction: Direction,
    /// Set only by [`check_minimality`].
    pub minimal: bool,
    pub residual: f64,
}

/// `f`, `f'`, `f''` of every factor.
pub(crate) struct Jets {
    series: Vec<[UniSeries; 3]>,
}

impl Jets {
    pub fn new(system: &FactorSystem) -> Self {
        let series = system
            .factors
            .iter()
            .map(|f| {
                let d1 = f.derivative();
                let d2 = d1.derivative();
                [f.clone(), d1, d2]
            })
            .collect();
        Jets { series }
    }

    /// `(x f'/f, f'/f + x f''/f - x (f'/f)^2)` for factor `i`.
    pub fn log_terms(&self, i: usize, x: Complex64) -> (Complex64, Complex64) {
        let [f, d1, d2] = &self.series[i];
        let (v, dv, ddv) = (f.eval(x), d1.eval(x), d2.eval(x));
        let q = dv / v;
        (x * q, q + x * ddv / v - x * q * q)
    }
}

/// `Σ t_i x f_i'(x)/f_i(x) - t_0` and its derivative in `x`.
fn balance(jets: &Jets, dir: &Direction, x: f64) -> (f64, f64) {
    let mut h = -dir.t0;
    let mut dh = 0.0;
    for (i, &ti) in dir.t.iter().enumerate() {
        let (a, b) = jets.log_terms(i, Complex64::new(x, 0.0));
        h += ti * a.re;
        dh += ti * b.re;
    }
    (h, dh)
}

/// Positive root of the balance equation by Newton's method safeguarded by bisection.
pub fn critical_point(system: &FactorSystem, dir: &Direction, guess: f64) -> Result<CriticalPoint, MixedError> {
    if dir.t.len() != system.d() {
        return Err(MixedError::InvalidDirection(format!(
            "{} weights for {} factors",
            dir.t.len(),
            system.d()
        )));
    }
    system.check_real()?;
    if dir.t0 == 0.0 {
        return Err(MixedError::DegenerateBoundary);
    }
    let jets = Jets::new(system);
    let cap = system
        .radii
        .iter()
        .map(|r| r * (1.0 - 1e-9))
        .fold(X_CAP, f64::min);

    // h(0) = -t0 < 0; walk right until the sign changes
    let mut lo = 0.0;
    let mut hi = if guess > 0.0 && guess.is_finite() { guess.min(cap) } else { 1f64.min(cap) };
    loop {
        let (h, _) = balance(&jets, dir, hi);
        if h.is_finite() && h >= 0.0 {
            break;
        }
        if hi >= cap {
            return Err(MixedError::OutsideCone(cap));
        }
        lo = hi;
        hi = (2.0 * hi).min(cap);
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (h, dh) = balance(&jets, dir, x);
        if h.abs() <= 1e-15 {
            break;
        }
        if h < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - h / dh;
        x = if dh > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let (h, _) = balance(&jets, dir, x);
    Ok(CriticalPoint {
        x,
        direction: dir.clone(),
        minimal: false,
        residual: h.abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// `-max_j log(Π |f_i(z_j)|^{t_i} / Π |f_i(x)|^{t_i})` over samples `z_j != x`.
    pub margin: f64,
}

/// Samples `M - 1` points `z != x` of the circle `|z| = x`. Strictness
/// between samples is not certified.
pub fn check_minimality(system: &FactorSystem, cp: &mut CriticalPoint, samples: usize) -> MinimalityReport {
    let x = cp.x;
    let weight = |z: Complex64| -> f64 {
        system
            .factors
            .iter()
            .zip(&cp.direction.t)
            .map(|(f, &t)| t * f.eval(z).norm().ln())
            .sum()
    };
    let at_x = weight(Complex64::new(x, 0.0));
    let worst = (1..samples)
        .map(|j| weight(Complex64::from_polar(x, TAU * j as f64 / samples as f64)) - at_x)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = -worst;
    cp.minimal = margin > MIN_MARGIN;
    MinimalityReport { minimal: cp.minimal, margin }
}

/// `1/(1 - z)` through `trunc`, trusted for `|z| < 1`.
pub fn geometric_factor(trunc: usize) -> (UniSeries, f64) {
    (UniSeries::from_real(&vec![1.0; trunc + 1]), 1.0)
}

/// `e^{rate z}` through `trunc`.
pub fn exponential_factor(trunc: usize, rate: f64) -> (UniSeries, f64) {
    let mut c = vec![1.0; trunc + 1];
    for n in 1..=trunc {
        c[n] = c[n - 1] * rate / n as f64;
    }
    (UniSeries::from_real(&c), f64::INFINITY)
}

/// `(1 + z)^m` padded with zeros to `trunc`.
pub fn binomial_factor(trunc: usize, m: u32) -> (UniSeries, f64) {
    let mut c = vec![0.0; trunc.max(m as usize) + 1];
    c[0] = 1.0;
    for j in 1..=m as usize {
        c[j] = c[j - 1] * (m as usize + 1 - j) as f64 / j as f64;
    }
    (UniSeries::from_real(&c).with_trunc(trunc), f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_factor(f: (UniSeries, f64), n1: u64, n0: u64) -> FactorSystem {
        FactorSystem::with_radii(vec![f.0], vec![n1], n0, vec![f.1]).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(FactorSystem::new(vec![], vec![], 1), Err(MixedError::NoFactors));
        let z = UniSeries::from_real(&[0.0, 1.0]);
        assert_eq!(FactorSystem::new(vec![z], vec![1], 1), Err(MixedError::ZeroConstant(0)));
        let f = UniSeries::from_real(&[1.0, 1.0]);
        assert!(matches!(FactorSystem::new(vec![f], vec![1, 2], 1), Err(MixedError::WeightCount { .. })));
        assert!(Direction::new(0.5, vec![0.4]).is_err());
        assert!(Direction::new(-0.1, vec![1.1]).is_err());
    }

    #[test]
    fn binomial_critical_point() {
        let sys = one_factor(binomial_factor(30, 1), 2, 1);
        let dir = Direction::new(1.0 / 3.0, vec![2.0 / 3.0]).unwrap();
        let cp = critical_point(&sys, &dir, 0.1).unwrap();
        assert!((cp.x - 1.0).abs() < 1e-12);
        assert!(cp.residual <= 1e-10);
    }

    #[test]
    fn exponential_critical_point() {
        let sys = one_factor(exponential_factor(60, 1.0), 1, 1);
        let dir = Direction::new(0.5, vec![0.5]).unwrap();
        let cp = critical_point(&sys, &dir, 3.0).unwrap();
        assert!((cp.x - 1.0).abs() < 1e-12, "{cp:?}");
        let dir = Direction::new(0.75, vec![0.25]).unwrap();
        assert!((critical_point(&sys, &dir, 0.5).unwrap().x - 3.0).abs() < 1e-10);
    }

    #[test]
    fn geometric_stays_inside_radius() {
        let sys = one_factor(geometric_factor(400), 1, 1);
        // x/(1 - x) = t0/t1 = 1 at x = 1/2
        let dir = Direction::new(0.5, vec![0.5]).unwrap();
        let cp = critical_point(&sys, &dir, 10.0).unwrap();
        assert!((cp.x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn boundary_and_cone() {
        let sys = one_factor(binomial_factor(10, 1), 1, 1);
        let dir = Direction::new(0.0, vec![1.0]).unwrap();
        assert_eq!(critical_point(&sys, &dir, 1.0), Err(MixedError::DegenerateBoundary));
        // x/(1+x) < 1 can never reach t0/t1 = 2
        let dir = Direction::new(2.0 / 3.0, vec![1.0 / 3.0]).unwrap();
        assert!(matches!(critical_point(&sys, &dir, 1.0), Err(MixedError::OutsideCone(_))));
    }

    #[test]
    fn minimality_examples() {
        let dir = Direction::new(1.0 / 3.0, vec![2.0 / 3.0]).unwrap();
        let sys = one_factor(binomial_factor(10, 1), 2, 1);
        let mut cp = critical_point(&sys, &dir, 1.0).unwrap();
        assert!(check_minimality(&sys, &mut cp, 1024).minimal && cp.minimal);

        // 1 + z^2 ties at z = -x
        let sys = one_factor((UniSeries::from_real(&[1.0, 0.0, 1.0]), f64::INFINITY), 2, 1);
        let mut cp = critical_point(&sys, &dir, 1.0).unwrap();
        let report = check_minimality(&sys, &mut cp, 1024);
        assert!(!report.minimal && report.margin.abs() < 1e-12);

        let sys = one_factor(exponential_factor(60, 1.0), 1, 1);
        let mut cp = critical_point(&sys, &Direction::new(0.5, vec![0.5]).unwrap(), 1.0).unwrap();
        assert!(check_minimality(&sys, &mut cp, 1024).minimal);
    }

    #[test]
    fn json_round_trip() {
        let (g, r) = geometric_factor(8);
        let sys = FactorSystem::with_radii(vec![g, binomial_factor(8, 2).0], vec![3, 4], 5, vec![r, f64::INFINITY]).unwrap();
        let text = serde_json::to_string(&sys.to_json()).unwrap();
        let back: FactorSystemJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_system().unwrap(), sys);
    }
}
