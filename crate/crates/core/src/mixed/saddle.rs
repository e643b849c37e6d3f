//! The phase function, the Cauchy integral on `|z| = x`, and exact extraction.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{check_minimality, critical_point, CriticalPoint, FactorSystem, Jets, MixedError};
use crate::series::UniSeries;

/// Steps larger than this (radians of `arg f`) are refined before unwrapping.
const MAX_PHASE_STEP: f64 = 0.5;

/// `Σ t_i [log f_i(x e^{iθ}) - log f_i(x)]` along increasing `|θ|`, with each
/// logarithm continued from `θ = 0`.
struct LogTracker<'a> {
    system: &'a FactorSystem,
    x: f64,
    base: Vec<Complex64>,
    theta: f64,
    logs: Vec<Complex64>,
}

impl<'a> LogTracker<'a> {
    fn new(system: &'a FactorSystem, x: f64) -> Self {
        let base: Vec<Complex64> = system.factors.iter().map(|f| f.eval(Complex64::new(x, 0.0))).collect();
        let logs = base.iter().map(|v| v.ln()).collect();
        LogTracker { system, x, base, theta: 0.0, logs }
    }

    fn advance(&mut self, theta: f64) -> Result<(), MixedError> {
        let z = Complex64::from_polar(self.x, theta);
        for (i, f) in self.system.factors.iter().enumerate() {
            let v = f.eval(z);
            let scale = self.base[i].norm();
            if !(v.norm() > 1e-300 && v.norm() > 1e-14 * scale) {
                return Err(MixedError::BranchTracking { index: i, theta });
            }
            let prev = self.logs[i];
            let step = v.ln() - prev;
            let wrapped = Complex64::new(step.re, step.im - TAU * (step.im / TAU).round());
            if wrapped.im.abs() > MAX_PHASE_STEP {
                // bisect the step until the phase moves slowly enough
                let mid = 0.5 * (self.theta + theta);
                if (theta - self.theta).abs() < 1e-9 {
                    return Err(MixedError::BranchTracking { index: i, theta });
                }
                self.advance(mid)?;
                return self.advance(theta);
            }
            self.logs[i] = prev + wrapped;
        }
        self.theta = theta;
        Ok(())
    }

    fn phase(&self, t0: f64, t: &[f64]) -> Complex64 {
        let mut s = Complex64::new(0.0, t0 * self.theta);
        for (i, &ti) in t.iter().enumerate() {
            s -= ti * (self.logs[i] - self.base[i].ln());
        }
        s
    }
}

/// `F(θ) = i t_0 θ - Σ t_i [log f_i(x e^{iθ}) - log f_i(x)]` with continuously
/// tracked logarithms.
pub fn phase_function(system: &FactorSystem, cp: &CriticalPoint, theta: f64) -> Result<Complex64, MixedError> {
    let mut tracker = LogTracker::new(system, cp.x);
    let steps = (theta.abs() / 0.05).ceil().max(1.0) as usize;
    for j in 1..=steps {
        tracker.advance(theta * j as f64 / steps as f64)?;
    }
    Ok(tracker.phase(cp.direction.t0, &cp.direction.t))
}

/// `F''(0) = Σ t_i x [f'/f + x f''/f - x (f'/f)^2]` at `x`.
fn phase_curvature(system: &FactorSystem, cp: &CriticalPoint) -> Complex64 {
    let jets = Jets::new(system);
    let x = Complex64::new(cp.x, 0.0);
    cp.direction
        .t
        .iter()
        .enumerate()
        .map(|(i, &t)| t * x * jets.log_terms(i, x).1)
        .sum()
}

/// `∫_{-π}^{π} exp{-‖n‖ F(θ)} dθ` on `nodes` uniform trapezoid nodes. With
/// integer exponents the integrand is `e^{-i n_0 θ} Π (f_i(x e^{iθ})/f_i(x))^{n_i}`,
/// which needs no branch and survives zeros of `f_i` on the circle.
fn trapezoid(system: &FactorSystem, cp: &CriticalPoint, nodes: usize) -> Complex64 {
    let base: Vec<Complex64> = system.factors.iter().map(|f| f.eval(Complex64::new(cp.x, 0.0))).collect();
    let h = TAU / nodes as f64;
    (0..nodes)
        .map(|j| {
            let theta = -std::f64::consts::PI + h * j as f64;
            let z = Complex64::from_polar(cp.x, theta);
            let mut v = Complex64::from_polar(1.0, -(system.n0 as f64) * theta);
            for ((f, b), &n) in system.factors.iter().zip(&base).zip(&system.weights) {
                v *= (f.eval(z) / b).powu(n as u32);
            }
            v
        })
        .sum::<Complex64>()
        * h
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub x: f64,
    pub margin: f64,
    /// `x^{-n_0} Π f_i(x)^{n_i} / (2π)`.
    pub prefactor: f64,
    /// Real part of the saddle integral; the imaginary part is in `integral_imag`.
    pub integral: f64,
    pub integral_imag: f64,
    pub estimate: f64,
    pub gaussian_leading: f64,
    pub curvature: f64,
    pub nodes: usize,
}

/// Trapezoid evaluation of the saddle integral at the direction of the system.
pub fn estimate_coefficient(system: &FactorSystem) -> Result<EstimateReport, MixedError> {
    let dir = system.direction()?;
    let mut cp = critical_point(system, &dir, 1.0)?;
    let minimality = check_minimality(system, &mut cp, 1024);
    if !minimality.minimal {
        return Err(MixedError::NonMinimal(minimality.margin));
    }
    let norm = system.norm() as f64;
    let nodes = 256usize.max(8 * (norm.sqrt().ceil() as usize) * system.d().max(2));
    let integral = trapezoid(system, &cp, nodes);
    let coarse = trapezoid(system, &cp, nodes / 2);
    let drift = (integral - coarse).norm() / integral.norm();
    if drift.is_nan() || drift > 1e-6 {
        return Err(MixedError::QuadratureNotConverged(drift));
    }

    let x = cp.x;
    let log_pref = -(system.n0 as f64) * x.ln()
        + system
            .factors
            .iter()
            .zip(&system.weights)
            .map(|(f, &n)| n as f64 * f.eval(Complex64::new(x, 0.0)).re.ln())
            .sum::<f64>();
    let prefactor = log_pref.exp() / TAU;
    let curvature = phase_curvature(system, &cp).re;
    let gaussian_leading = log_pref.exp() / (TAU * norm * curvature).sqrt();
    Ok(EstimateReport {
        x,
        margin: minimality.margin,
        prefactor,
        integral: integral.re,
        integral_imag: integral.im,
        estimate: prefactor * integral.re,
        gaussian_leading,
        curvature,
        nodes,
    })
}

/// `[z^{n_0}] Π f_i^{n_i}` by binary powering, truncated at `n_0`.
pub fn exact_coefficient(system: &FactorSystem) -> Result<Complex64, MixedError> {
    let n = system.n0 as usize;
    let mut acc = UniSeries::constant(n, Complex64::new(1.0, 0.0));
    for (i, (f, &e)) in system.factors.iter().zip(&system.weights).enumerate() {
        if e == 0 {
            continue;
        }
        if f.trunc() < n {
            return Err(MixedError::TruncationShortfall { index: i, needed: n, have: f.trunc() });
        }
        let mut base = f.with_trunc(n);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_trunc(&base, n);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_trunc(&base, n);
            }
        }
    }
    Ok(acc.coeff(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::mixed::{binomial_factor, exponential_factor, Direction};

    fn binomial(n: u64) -> FactorSystem {
        let (f, r) = binomial_factor(n as usize, 1);
        FactorSystem::with_radii(vec![f], vec![2 * n], n, vec![r]).unwrap()
    }

    fn central_binomial(n: u64) -> f64 {
        (1..=n).fold(1.0, |acc, j| acc * (n + j) as f64 / j as f64)
    }

    #[test]
    fn exact_examples() {
        let sys = FactorSystem::new(vec![binomial_factor(4, 1).0], vec![4], 2).unwrap();
        assert!((exact_coefficient(&sys).unwrap() - Complex64::new(6.0, 0.0)).norm() < 1e-12);
        assert!((exact_coefficient(&binomial(10)).unwrap().re - 184756.0).abs() < 1e-6);
        let f = UniSeries::from_real(&[2.0, 1.0, 1.0]);
        let g = UniSeries::from_real(&[-1.5, 3.0]);
        let sys = FactorSystem::new(vec![f, g], vec![3, 2], 0).unwrap();
        assert!((exact_coefficient(&sys).unwrap().re - 8.0 * 2.25).abs() < 1e-12);
        let sys = FactorSystem::new(vec![binomial_factor(3, 1).0], vec![8], 5).unwrap();
        assert!(matches!(exact_coefficient(&sys), Err(MixedError::TruncationShortfall { .. })));
    }

    #[test]
    fn phase_examples() {
        let (f, _) = exponential_factor(60, 1.0);
        let sys = FactorSystem::new(vec![f], vec![1], 1).unwrap();
        let cp = critical_point(&sys, &Direction::new(0.5, vec![0.5]).unwrap(), 1.0).unwrap();
        assert_eq!(phase_function(&sys, &cp, 0.0).unwrap(), Complex64::default());
        for theta in [0.3, -1.2, 2.5, PI] {
            let i = Complex64::i();
            let want = (i * theta + 1.0 - (i * theta).exp()) / 2.0;
            assert!((phase_function(&sys, &cp, theta).unwrap() - want).norm() < 1e-13, "{theta}");
        }
        assert!((phase_curvature(&sys, &cp).re - 0.5).abs() < 1e-13);

        let sys = binomial(10);
        let cp = critical_point(&sys, &Direction::new(1.0 / 3.0, vec![2.0 / 3.0]).unwrap(), 1.0).unwrap();
        let h = 1e-4;
        let f = |t: f64| phase_function(&sys, &cp, t).unwrap();
        let second = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let first = (f(h) - f(-h)) / (2.0 * h);
        assert!((second.re - 1.0 / 6.0).abs() < 1e-6);
        assert!(first.norm() < 1e-8);
        assert!((phase_curvature(&sys, &cp).re - 1.0 / 6.0).abs() < 1e-14);
        // conjugate symmetry for real factors
        assert!((f(0.7) - f(-0.7).conj()).norm() < 1e-14);
    }

    #[test]
    fn phase_follows_branch_past_pi() {
        // arg (1 + z)^... wraps once x > 1; tracking keeps F continuous
        let sys = FactorSystem::new(vec![binomial_factor(10, 1).0], vec![1], 1).unwrap();
        let cp = CriticalPoint {
            x: 2.0,
            direction: Direction::new(0.5, vec![0.5]).unwrap(),
            minimal: false,
            residual: 0.0,
        };
        let a = phase_function(&sys, &cp, PI - 1e-3).unwrap();
        let b = phase_function(&sys, &cp, PI - 2e-3).unwrap();
        assert!((a - b).norm() < 1e-2);
    }

    #[test]
    fn central_binomial_estimates() {
        let report = estimate_coefficient(&binomial(10)).unwrap();
        assert!((report.estimate / 184756.0 - 1.0).abs() < 1e-10);
        assert!((report.gaussian_leading - 4f64.powi(10) / (10.0 * PI).sqrt()).abs() < 1e-6);
        assert!(report.integral_imag.abs() <= 1e-10 * report.integral.abs());
        let small = FactorSystem::new(vec![binomial_factor(2, 1).0], vec![2], 1).unwrap();
        assert!((estimate_coefficient(&small).unwrap().estimate - 2.0).abs() < 1e-10);
        let mut last = f64::INFINITY;
        for n in [10, 20, 40, 80] {
            let r = estimate_coefficient(&binomial(n)).unwrap();
            let err = (r.gaussian_leading / central_binomial(n) - 1.0).abs();
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn exponential_estimate() {
        let (f, _) = exponential_factor(80, 1.0);
        let sys = FactorSystem::new(vec![f], vec![20], 20).unwrap();
        let exact = (1..=20).fold(1.0, |acc, j| acc * 20.0 / j as f64);
        assert!((exact_coefficient(&sys).unwrap().re / exact - 1.0).abs() < 1e-12);
        let report = estimate_coefficient(&sys).unwrap();
        assert!((report.estimate / exact - 1.0).abs() < 0.01);
    }
}
