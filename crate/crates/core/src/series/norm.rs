//! Sampled sup/inf of `|f|` on circles `|z| = r`.
//!
//! Sampling gives a lower bound for the sup (upper bound for the inf); one
//! golden-section pass around the best sample sharpens it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Poly, Result, SeriesError, UniSeries};

pub const DEFAULT_SAMPLES: usize = 1024;
pub const MIN_SAMPLES: usize = 64;

/// Outer radius `R`, working radius `r` and circle sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSpec {
    pub outer: f64,
    pub radius: f64,
    pub samples: usize,
}

impl DiskSpec {
    pub fn new(outer: f64, radius: f64, samples: usize) -> Result<Self> {
        if !(radius > 0.0 && radius < outer && outer.is_finite()) {
            return Err(SeriesError::InvalidArgument(format!(
                "need 0 < r < R, got r = {radius}, R = {outer}"
            )));
        }
        if samples < MIN_SAMPLES {
            return Err(SeriesError::InvalidArgument(format!(
                "need at least {MIN_SAMPLES} circle samples, got {samples}"
            )));
        }
        Ok(DiskSpec {
            outer,
            radius,
            samples,
        })
    }
}

/// Anything that can be evaluated at a complex point.
pub trait Evaluate {
    fn evaluate(&self, z: Complex64) -> Complex64;
}

impl Evaluate for UniSeries {
    fn evaluate(&self, z: Complex64) -> Complex64 {
        self.eval(z)
    }
}

impl Evaluate for Poly {
    fn evaluate(&self, z: Complex64) -> Complex64 {
        self.eval(z)
    }
}

impl<F: Fn(Complex64) -> Complex64> Evaluate for F {
    fn evaluate(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

/// `max |f(r e^{i theta})|`, estimated from below.
pub fn circle_norm<E: Evaluate + ?Sized>(f: &E, r: f64, samples: usize) -> f64 {
    circle_max(|z| f.evaluate(z).norm(), r, samples)
}

pub fn circle_max<G: Fn(Complex64) -> f64>(g: G, r: f64, samples: usize) -> f64 {
    extremum(&g, r, samples, true)
}

pub fn circle_min<G: Fn(Complex64) -> f64>(g: G, r: f64, samples: usize) -> f64 {
    extremum(&g, r, samples, false)
}

fn extremum<G: Fn(Complex64) -> f64>(g: &G, r: f64, samples: usize, max: bool) -> f64 {
    let samples = samples.max(1);
    let h = 2.0 * PI / samples as f64;
    let at = |theta: f64| g(Complex64::from_polar(r, theta));
    let better = |a: f64, b: f64| if max { a > b } else { a < b };
    let (mut best_theta, mut best) = (0.0, at(0.0));
    for j in 1..samples {
        let theta = j as f64 * h;
        let v = at(theta);
        if better(v, best) {
            best = v;
            best_theta = theta;
        }
    }
    // golden-section search on [best - h, best + h]
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_theta - h, best_theta + h);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (at(x1), at(x2));
    for _ in 0..60 {
        if better(f1, f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = at(x2);
        }
    }
    for v in [f1, f2] {
        if better(v, best) {
            best = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_circle() {
        let f = UniSeries::identity(3);
        assert!((circle_norm(&f, 0.5, 1024) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_norm() {
        let f = UniSeries::constant(2, Complex64::new(3.0, -4.0));
        assert!((circle_norm(&f, 0.9, 64) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn one_plus_z_attains_two() {
        let f = UniSeries::from_real(&[1.0, 1.0]);
        assert!((circle_norm(&f, 1.0, 1024) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn refinement_finds_off_grid_peak() {
        // |1 + z e^{-i phi}| peaks at theta = phi, between samples for M = 64
        let phi = 0.0123;
        let rot = Complex64::from_polar(1.0, -phi);
        let f = move |z: Complex64| Complex64::new(1.0, 0.0) + z * rot;
        let v = circle_norm(&f, 1.0, 64);
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn inf_of_shifted_circle() {
        // min |z - 0.2| on |z| = 0.75 is 0.55
        let v = circle_min(|z| (z - 0.2).norm(), 0.75, 2048);
        assert!((v - 0.55).abs() < 1e-12);
    }

    #[test]
    fn disk_spec_validation() {
        assert!(DiskSpec::new(1.0, 0.75, 1024).is_ok());
        assert!(DiskSpec::new(1.0, 1.5, 1024).is_err());
        assert!(DiskSpec::new(1.0, 0.5, 32).is_err());
        assert!(DiskSpec::new(1.0, 0.0, 128).is_err());
    }
}
