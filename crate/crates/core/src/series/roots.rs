//! Aberth–Ehrlich simultaneous root iteration with multiplicity clustering.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Poly, Result, SeriesError};

#[derive(Debug, Clone)]
pub struct RootOptions {
    /// Roots closer than this (relative to `max(1, |z|)`) are merged outright.
    pub cluster_radius: f64,
    /// Groups within this radius are merged only if their centre passes a
    /// multiple-root test.
    pub refine_radius: f64,
    pub max_sweeps: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            cluster_radius: 1e-6,
            refine_radius: 1e-3,
            max_sweeps: 5000,
        }
    }
}

/// All `k` roots of `p`, repeated according to multiplicity.
pub fn poly_roots(p: &Poly, opts: &RootOptions) -> Result<Vec<Complex64>> {
    if p.degree() == 0 {
        return Err(SeriesError::InvalidArgument(
            "root finding needs degree >= 1".into(),
        ));
    }
    let c = p.coeffs();
    let zeros = c.iter().take_while(|a| **a == Complex64::default()).count();
    let mut roots = vec![Complex64::default(); zeros];
    roots.extend(aberth(&c[zeros..], opts.max_sweeps)?);
    Ok(cluster_roots(p, roots, opts))
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::default();
    let mut dp = Complex64::default();
    let mut bound = 0.0;
    let az = z.norm();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        bound = bound * az + a.norm();
    }
    (p, dp, bound)
}

fn aberth(c: &[Complex64], max_sweeps: usize) -> Result<Vec<Complex64>> {
    let m = c.len() - 1;
    if m == 0 {
        return Ok(Vec::new());
    }
    let lead = c[m];
    if m == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    let radius = 1.0
        + c[..m]
            .iter()
            .map(|a| (a / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / m as f64 + 0.4))
        .collect();
    let mut done = vec![false; m];
    for _ in 0..max_sweeps {
        let mut all_done = true;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = horner(c, z[i]);
            if p.norm() <= 8.0 * f64::EPSILON * bound {
                done[i] = true;
                continue;
            }
            all_done = false;
            if dp == Complex64::default() {
                let nudge = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += nudge;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            if step.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    Err(SeriesError::NoConvergence(max_sweeps))
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    if c.len() <= 1 {
        return vec![Complex64::default()];
    }
    c.iter().enumerate().skip(1).map(|(n, &a)| a * n as f64).collect()
}

/// Single-linkage groups of indices whose members are within `radius * max(1, |z|)`.
fn groups(z: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let n = z.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1f64.max(z[i].norm()).max(z[j].norm());
            if (z[i] - z[j]).norm() <= radius * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut label, i);
        match root_of[r] {
            Some(g) => out[g].push(i),
            None => {
                root_of[r] = Some(out.len());
                out.push(vec![i]);
            }
        }
    }
    out
}

/// Merges numerically coincident roots into exact repeats.
///
/// Roots within `cluster_radius` are replaced by their mean. Wider groups
/// (within `refine_radius`) of total size `m` are merged when Newton's method
/// on `p^(m-1)` started from their mean lands on a point where
/// `p, p', ..., p^(m-1)` all vanish to working accuracy.
pub fn cluster_roots(p: &Poly, roots: Vec<Complex64>, opts: &RootOptions) -> Vec<Complex64> {
    let mut derivs = vec![p.coeffs().to_vec()];
    for _ in 1..p.degree() {
        let next = derivative(derivs.last().expect("nonempty"));
        derivs.push(next);
    }
    let mut z = roots;
    for g in groups(&z, opts.cluster_radius) {
        if g.len() > 1 {
            let mean = g.iter().map(|&i| z[i]).sum::<Complex64>() / g.len() as f64;
            let centre = polish_multiple(&derivs, mean, g.len()).unwrap_or(mean);
            for &i in &g {
                z[i] = centre;
            }
        }
    }
    for g in groups(&z, opts.refine_radius) {
        let m = g.len();
        if m < 2 || g.iter().all(|&i| z[i] == z[g[0]]) {
            continue;
        }
        let mean = g.iter().map(|&i| z[i]).sum::<Complex64>() / m as f64;
        if let Some(centre) = polish_multiple(&derivs, mean, m) {
            for &i in &g {
                z[i] = centre;
            }
        }
    }
    z
}

/// Newton's method on `p^(m-1)` from `start`; the result is kept only if
/// `p, ..., p^(m-1)` all vanish there to working accuracy.
fn polish_multiple(derivs: &[Vec<Complex64>], start: Complex64, m: usize) -> Option<Complex64> {
    let mut centre = start;
    let top = &derivs[m - 1];
    for _ in 0..50 {
        let (v, dv, _) = horner(top, centre);
        if dv == Complex64::default() {
            break;
        }
        let step = v / dv;
        centre -= step;
        if step.norm() <= f64::EPSILON * (1.0 + centre.norm()) {
            break;
        }
    }
    derivs[..m]
        .iter()
        .all(|d| {
            let (v, _, bound) = horner(d, centre);
            v.norm() <= 1e-9 * bound.max(f64::MIN_POSITIVE)
        })
        .then_some(centre)
}

/// Distinct values with their multiplicities.
pub fn with_multiplicity(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for &r in roots {
        match out.iter_mut().find(|(v, _)| *v == r) {
            Some(entry) => entry.1 += 1,
            None => out.push((r, 1)),
        }
    }
    out
}
