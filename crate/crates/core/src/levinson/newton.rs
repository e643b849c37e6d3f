//! Whole-system Newton solve of the Levinson coefficient equations.
//!
//! Unknowns are every free coefficient at once: `v_{j,α}` for `|α| ≤ N - j`
//! (except the pinned `v_j(0') = 0`, `j < k`) and `x_{α,n}` for `n ≥ 2`,
//! `|α| + n ≤ N - k + 1`. Equations are the coefficients of `U` through
//! total degree `N`, minus the `t_d^n`, `n < k`, axis ones that hold
//! identically. The start is `x = t_d`, `v_k = v_k(0')`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{expand, lu_solve, LevinsonError, LevinsonForm, Problem, SolveStats, SINGULAR_RATIO};
use crate::series::{degree_at_most, MultiSeries, SeriesError};
use crate::weierstrass::exponent;

const MAX_ITERATIONS: usize = 60;

enum Slot {
    V(usize, Vec<u32>),
    X(Vec<u32>),
}

/// `s · t^e`, dropping terms above `trunc`.
fn shift(s: &MultiSeries, e: &[u32], trunc: usize) -> Result<MultiSeries, SeriesError> {
    MultiSeries::from_terms(
        s.nvars(),
        trunc,
        s.terms()
            .map(|(a, c)| (a.iter().zip(e).map(|(x, y)| x + y).collect::<Vec<u32>>(), c))
            .filter(|(a, _)| a.iter().map(|&x| x as usize).sum::<usize>() <= trunc),
    )
}

pub fn decompose_newton(u: &MultiSeries, trunc: usize) -> Result<LevinsonForm, LevinsonError> {
    decompose_newton_with_stats(u, trunc).map(|(form, _)| form)
}

pub fn decompose_newton_with_stats(
    u: &MultiSeries,
    trunc: usize,
) -> Result<(LevinsonForm, SolveStats), LevinsonError> {
    let pb = Problem::new(u, trunc)?;
    let (d, n, k) = (pb.d, pb.n, pb.k);

    let mut slots = Vec::new();
    for j in 0..=k {
        for alpha in degree_at_most(d - 1, n - j) {
            if j < k && alpha.iter().all(|&a| a == 0) {
                continue;
            }
            slots.push(Slot::V(j, alpha));
        }
    }
    for e in degree_at_most(d, pb.x_trunc()) {
        if e[d - 1] >= 2 {
            slots.push(Slot::X(e));
        }
    }
    let rows: BTreeMap<Vec<u32>, usize> = degree_at_most(d, n)
        .into_iter()
        .filter(|e| !(e[..d - 1].iter().all(|&a| a == 0) && (e[d - 1] as usize) < k))
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let size = slots.len();
    debug_assert_eq!(size, rows.len());

    let mut v = vec![MultiSeries::zero(d, n); k + 1];
    v[k].set(vec![0; d], pb.lead);
    let mut x = MultiSeries::zero(d, pb.x_trunc());
    x.set(exponent(&vec![0; d - 1], 1), Complex64::new(1.0, 0.0));

    let scale = pb.target.max_abs().max(1.0);
    let mut pivot_ratio = 1.0f64;
    let mut residual_norm = f64::INFINITY;
    for iteration in 0..MAX_ITERATIONS {
        let residual = pb.target.sub(&expand(&v, &x, n)?)?;
        residual_norm = rows.keys().map(|e| residual.coeff(e).norm()).fold(0.0, f64::max);
        if residual_norm <= 1e-14 * scale {
            let stats = SolveStats { pivot_ratio, iterations: iteration };
            return Ok((pb.finish(&v, x)?, stats));
        }

        let mut powers = vec![MultiSeries::one(d, n)];
        for j in 1..=k {
            powers.push(powers[j - 1].mul_poly(&x, n)?);
        }
        let mut slope = MultiSeries::zero(d, n);
        for j in 1..=k {
            slope = slope.add(&v[j].mul_poly(&powers[j - 1], n)?.scale((j as f64).into()))?;
        }

        let mut a = DMatrix::<Complex64>::zeros(size, size);
        for (col, slot) in slots.iter().enumerate() {
            let column = match slot {
                Slot::V(j, alpha) => shift(&powers[*j], &exponent(alpha, 0), n)?,
                Slot::X(e) => shift(&slope, e, n)?,
            };
            for (e, c) in column.terms() {
                if let Some(&row) = rows.get(e) {
                    a[(row, col)] = c;
                }
            }
        }
        let mut b = DVector::<Complex64>::zeros(size);
        for (e, &row) in &rows {
            b[row] = residual.coeff(e);
        }
        let (step, ratio) = lu_solve(a, b).ok_or(LevinsonError::Singular { grade: 0, ratio: 0.0 })?;
        if ratio < SINGULAR_RATIO {
            return Err(LevinsonError::Singular { grade: 0, ratio });
        }
        pivot_ratio = pivot_ratio.min(ratio);
        let step_norm = step.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let size = v.iter().map(|s| s.max_abs()).fold(x.max_abs(), f64::max);
        for (slot, &dz) in slots.iter().zip(step.iter()) {
            match slot {
                Slot::V(j, alpha) => {
                    let e = exponent(alpha, 0);
                    let c = v[*j].coeff(&e) + dz;
                    v[*j].set(e, c);
                }
                Slot::X(e) => {
                    let c = x.coeff(e) + dz;
                    x.set(e.clone(), c);
                }
            }
        }
        // the update has reached rounding level; further steps only reshuffle noise
        if step_norm <= 4.0 * f64::EPSILON * size && residual_norm <= 1e-6 * scale.max(size) {
            let stats = SolveStats { pivot_ratio, iterations: iteration + 1 };
            return Ok((pb.finish(&v, x)?, stats));
        }
    }
    if residual_norm <= 1e-11 * scale {
        let stats = SolveStats { pivot_ratio, iterations: MAX_ITERATIONS };
        return Ok((pb.finish(&v, x)?, stats));
    }
    Err(LevinsonError::NoConvergence { iterations: MAX_ITERATIONS, residual: residual_norm })
}
