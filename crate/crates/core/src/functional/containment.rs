//! Root containment for `P = Q ∘ y` with `deg P = deg Q = k`.
//!
//! Two sides are evaluated independently:
//!
//! * the containment `Q^{-1}{0} ⊂ y(D)`, by Newton's method on
//!   `y(z) = w` from the roots of `P` and a polar grid of seeds, falling
//!   back on the argument principle on `|z| = R` to tell "no preimage" from
//!   "not found";
//! * the local condition: `y'(z_i) != 0` at every root of `P`, and equal
//!   images only for equal roots.
//!
//! When the local condition holds, `Q(w) = q · Π (w - y(z_i))` is checked
//! coefficientwise.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::FunctionalError;
use crate::series::{DiskSpec, Poly, UniSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Relative tolerance on the premise `P = Q ∘ y`.
    pub premise_tol: f64,
    /// `|y'(z_i)|` at or below this counts as zero.
    pub derivative_tol: f64,
    /// Images of distinct roots closer than this count as equal.
    pub image_tol: f64,
    /// Newton acceptance for `|y(z) - w|`, relative to `1 + |w|`.
    pub solve_tol: f64,
    /// Seeds per ring of the polar grid.
    pub grid_angles: usize,
    pub grid_rings: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            premise_tol: 1e-8,
            derivative_tol: 1e-8,
            image_tol: 1e-8,
            solve_tol: 1e-11,
            grid_angles: 16,
            grid_rings: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    Contained,
    NotContained,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReport {
    /// The local condition at the roots of `P`.
    pub holds: bool,
    pub derivative_ok: bool,
    pub injective_ok: bool,
    pub containment: Containment,
    /// Leading coefficient of `Q`.
    pub q: Complex64,
    /// `y(z_i)` for the roots `z_i` of `P`, with multiplicity.
    pub mapped_roots: Vec<Complex64>,
    /// Coefficient gap of `Q(w) - q Π (w - y(z_i))`; present when `holds`.
    pub factorization_residual: Option<f64>,
    pub premise_residual: f64,
}

impl ContainmentReport {
    /// Both sides agree and neither is undecided.
    pub fn consistent(&self) -> bool {
        match self.containment {
            Contained => self.holds,
            NotContained => !self.holds,
            Undecided => false,
        }
    }
}

use Containment::*;

pub fn containment_check(
    p: &Poly,
    q: &Poly,
    y: &UniSeries,
    disk: &DiskSpec,
    opts: &CheckOptions,
) -> Result<ContainmentReport, FunctionalError> {
    let k = p.degree();
    if k != q.degree() || k == 0 {
        return Err(FunctionalError::DegreeMismatch { p: k, q: q.degree() });
    }
    let composed = q.compose_series(y);
    let target = p.to_series(y.trunc());
    let scale = target.max_abs().max(1.0);
    let premise_residual = composed.max_abs_diff(&target) / scale;
    if premise_residual > opts.premise_tol {
        return Err(FunctionalError::Premise(premise_residual));
    }

    let roots = p.roots()?;
    if let Some(&z) = roots.iter().find(|z| z.norm() >= disk.outer) {
        return Err(FunctionalError::RootOutsideDisk(z));
    }
    let mapped_roots: Vec<Complex64> = roots.iter().map(|&z| y.eval(z)).collect();

    let derivative_ok = roots
        .iter()
        .all(|&z| y.eval_with_derivative(z).1.norm() > opts.derivative_tol);
    let mut injective_ok = true;
    for i in 0..k {
        for j in i + 1..k {
            let same_root = roots[i] == roots[j];
            let same_image = (mapped_roots[i] - mapped_roots[j]).norm()
                <= opts.image_tol * (1.0 + mapped_roots[i].norm());
            if same_image && !same_root {
                injective_ok = false;
            }
        }
    }
    let holds = derivative_ok && injective_ok;

    let q_roots = q.roots()?;
    let mut seeds = roots.clone();
    for ring in 1..=opts.grid_rings {
        let radius = disk.outer * ring as f64 / (opts.grid_rings + 1) as f64;
        for a in 0..opts.grid_angles {
            seeds.push(Complex64::from_polar(radius, TAU * a as f64 / opts.grid_angles as f64));
        }
    }
    let mut containment = Contained;
    for &w in &q_roots {
        let side = if find_preimage(y, w, &seeds, disk.outer, opts.solve_tol).is_some() {
            Contained
        } else {
            match winding_count(y, w, disk.outer, disk.samples.max(4096)) {
                Some(0) => NotContained,
                _ => Undecided,
            }
        };
        containment = match (containment, side) {
            (NotContained, _) | (_, NotContained) => NotContained,
            (Undecided, _) | (_, Undecided) => Undecided,
            _ => Contained,
        };
    }

    let lead = q.leading();
    let factorization_residual = holds.then(|| {
        let fitted = Poly::from_roots(&mapped_roots, lead);
        q.coeffs()
            .iter()
            .zip(fitted.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    });

    Ok(ContainmentReport {
        holds,
        derivative_ok,
        injective_ok,
        containment,
        q: lead,
        mapped_roots,
        factorization_residual,
        premise_residual,
    })
}

/// Newton's method on `y(z) = w` from each seed; returns a solution inside the disk.
fn find_preimage(y: &UniSeries, w: Complex64, seeds: &[Complex64], outer: f64, tol: f64) -> Option<Complex64> {
    for &seed in seeds {
        let mut z = seed;
        for _ in 0..60 {
            let (v, dv) = y.eval_with_derivative(z);
            let gap = v - w;
            if gap.norm() <= tol * (1.0 + w.norm()) {
                if z.norm() < outer {
                    return Some(z);
                }
                break;
            }
            if dv.norm() == 0.0 || !z.is_finite() || z.norm() > 2.0 * outer {
                break;
            }
            z -= gap / dv;
        }
    }
    None
}

/// Number of solutions of `y(z) = w` in `|z| < outer` by the argument principle;
/// `None` when `y - w` comes too close to zero on the circle.
fn winding_count(y: &UniSeries, w: Complex64, outer: f64, samples: usize) -> Option<usize> {
    let values: Vec<Complex64> = (0..=samples)
        .map(|j| y.eval(Complex64::from_polar(outer, TAU * j as f64 / samples as f64)) - w)
        .collect();
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if floor <= 1e-9 * scale.max(1.0) {
        return None;
    }
    let mut turn = 0.0;
    for pair in values.windows(2) {
        let step = (pair[1] / pair[0]).arg();
        if step.abs() > 1.0 {
            return None;
        }
        turn += step;
    }
    let count = (turn / TAU).round();
    (count >= 0.0 && (turn / TAU - count).abs() < 1e-6).then_some(count as usize)
}
