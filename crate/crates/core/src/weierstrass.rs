//! Order of vanishing and Weierstrass preparation `U = V · (t_d^k + Σ u_j(t') t_d^j)`.
//!
//! The last variable plays the role of `t_d`; the others form `t'`. All series
//! are graded by their total degree in `t'` and solved grade by grade. At
//! grade `m` the unknown pieces `V_m` and `u_{j,m}` enter linearly through
//!
//! ```text
//! R_m = V_m · t_d^k + V_0(t_d) · Σ_j u_{j,m} t_d^j
//! ```
//!
//! where `R_m` is the grade-`m` part of `U - V_{<m} · P_{<m}`. Since `V_0` is a
//! unit, the `t_d^j` coefficients with `j < k` fix `u_{j,m}` by forward
//! substitution and the remaining ones give `V_m`.
//!
//! Truncation: with `U` known to total degree `N`, `V` is produced to degree
//! `N - k` and `u_j` to degree `N - j`. Coefficients of `V` that the
//! truncated input does not determine are taken as zero, so `U - V·P`
//! vanishes through degree `N` by construction. For a germ that is a
//! polynomial of degree at most `N` this reproduces the exact factorization;
//! for general germs high-order coefficients depend on information beyond
//! the truncation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{
    monomials_of_degree, poly_roots, MultiSeries, Poly, RootOptions, SeriesError, SeriesJson,
};

/// Relative threshold deciding whether an axis coefficient is nonzero.
pub const ORDER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierstrassError {
    #[error("order of vanishing undetermined at truncation {0}")]
    OrderUndetermined(usize),
    #[error("need at least two variables, got {0}")]
    TooFewVariables(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { got: usize, expected: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `U = V · P` with `P = t_d^k + Σ_{j<k} u_j(t') t_d^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassForm {
    pub k: usize,
    /// The unit, in all `d` variables, truncated at `trunc - k`.
    pub v: MultiSeries,
    /// `u_0 .. u_{k-1}` in the `d - 1` variables `t'`; `u_j` is truncated at `trunc - j`.
    pub u: Vec<MultiSeries>,
    pub trunc: usize,
}

/// `min { n : [t_d^n] U(0', t_d) != 0 }`, with "nonzero" meaning above
/// [`ORDER_TOL`] times the largest axis coefficient.
pub fn vanishing_order(u: &MultiSeries) -> Result<usize, WeierstrassError> {
    let axis = u.axis_coeffs();
    let scale = axis.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(WeierstrassError::OrderUndetermined(u.trunc()));
    }
    Ok(axis
        .iter()
        .position(|c| c.norm() > ORDER_TOL * scale)
        .expect("scale is attained"))
}

/// Weierstrass preparation of `u` through total degree `min(trunc, u.trunc())`.
pub fn prepare(u: &MultiSeries, trunc: usize) -> Result<WeierstrassForm, WeierstrassError> {
    let d = u.nvars();
    if d < 2 {
        return Err(WeierstrassError::TooFewVariables(d));
    }
    let n = trunc.min(u.trunc());
    let target = u.with_trunc(n);
    let k = vanishing_order(&target)?;
    let dp = d - 1;
    let axis = target.axis_coeffs();

    // V_0(t_d) = U(0', t_d) / t_d^k, known through t_d^(n-k)
    let unit0: Vec<Complex64> = axis[k..].to_vec();
    let mut v = MultiSeries::zero(d, n - k);
    for (e, &c) in unit0.iter().enumerate() {
        v.set(exponent(&vec![0; dp], e), c);
    }
    let v0 = |e: usize| unit0.get(e).copied().unwrap_or_default();
    let mut us = vec![MultiSeries::zero(d, n); k];

    for m in 1..=n {
        let p = weierstrass_polynomial(d, n, k, &us);
        let residual = target.sub(&v.mul_poly(&p, n)?)?;
        let depth = n - m;
        for alpha in monomials_of_degree(dp, m) {
            let r: Vec<Complex64> = (0..=depth)
                .map(|i| residual.coeff(&exponent(&alpha, i)))
                .collect();
            let mut q = vec![Complex64::default(); k.min(depth + 1)];
            for i in 0..q.len() {
                let s: Complex64 = (0..i).map(|j| v0(i - j) * q[j]).sum();
                q[i] = (r[i] - s) / v0(0);
            }
            for (j, &qj) in q.iter().enumerate() {
                us[j].set(exponent(&alpha, 0), qj);
            }
            for i in k..=depth {
                let s: Complex64 = q.iter().enumerate().map(|(j, &qj)| v0(i - j) * qj).sum();
                v.set(exponent(&alpha, i - k), r[i] - s);
            }
        }
    }

    let u = us
        .iter()
        .enumerate()
        .map(|(j, s)| drop_last(s, n - j))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeierstrassForm { k, v, u, trunc: n })
}

pub(crate) fn exponent(alpha: &[u32], last: usize) -> Vec<u32> {
    let mut e = alpha.to_vec();
    e.push(last as u32);
    e
}

/// `t_d^k + Σ u_j t_d^j` with each `u_j` given in all `d` variables.
fn weierstrass_polynomial(d: usize, trunc: usize, k: usize, us: &[MultiSeries]) -> MultiSeries {
    let mut p = MultiSeries::zero(d, trunc);
    p.set(exponent(&vec![0; d - 1], k), Complex64::new(1.0, 0.0));
    for (j, uj) in us.iter().enumerate() {
        for (e, c) in uj.terms() {
            let mut e = e.to_vec();
            e[d - 1] += j as u32;
            p.add_to(e, c);
        }
    }
    p
}

/// Removes the (unused) last variable of a series that does not depend on it.
pub(crate) fn drop_last(s: &MultiSeries, trunc: usize) -> Result<MultiSeries, SeriesError> {
    let d = s.nvars();
    MultiSeries::from_terms(
        d - 1,
        trunc,
        s.terms()
            .filter(|(e, _)| e[..d - 1].iter().map(|&x| x as usize).sum::<usize>() <= trunc)
            .map(|(e, c)| (e[..d - 1].to_vec(), c)),
    )
}

/// Lifts a series in `t'` to all `d` variables.
pub(crate) fn lift(s: &MultiSeries, trunc: usize) -> MultiSeries {
    let mut out = MultiSeries::zero(s.nvars() + 1, trunc);
    for (e, c) in s.terms() {
        out.set(exponent(e, 0), c);
    }
    out
}

impl WeierstrassForm {
    pub fn nvars(&self) -> usize {
        self.v.nvars()
    }

    /// The Weierstrass polynomial `P` as a series in all `d` variables.
    pub fn polynomial(&self) -> MultiSeries {
        let lifted: Vec<MultiSeries> = self.u.iter().map(|s| lift(s, self.trunc)).collect();
        weierstrass_polynomial(self.nvars(), self.trunc, self.k, &lifted)
    }

    /// `U - V·P` through total degree `trunc`.
    pub fn residual(&self, u: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        u.with_trunc(self.trunc)
            .sub(&self.v.mul_poly(&self.polynomial(), self.trunc)?)
    }

    /// The `k` roots in `t_d` of `P(t', t_d)` at a fixed `t'`, with multiplicity.
    pub fn slice_roots(&self, point: &[Complex64]) -> Result<Vec<Complex64>, WeierstrassError> {
        let expected = self.nvars() - 1;
        if point.len() != expected {
            return Err(WeierstrassError::PointDimension {
                got: point.len(),
                expected,
            });
        }
        if self.k == 0 {
            return Ok(Vec::new());
        }
        let mut coeffs = self
            .u
            .iter()
            .map(|s| s.eval(point))
            .collect::<Result<Vec<_>, _>>()?;
        coeffs.push(Complex64::new(1.0, 0.0));
        let p = Poly::new(coeffs)?;
        Ok(poly_roots(&p, &RootOptions::default())?)
    }

    pub fn to_json(&self) -> WeierstrassJson {
        WeierstrassJson {
            k: self.k,
            trunc: self.trunc,
            v: SeriesJson::from(&self.v),
            u: self.u.iter().map(SeriesJson::from).collect(),
        }
    }
}

/// Wire form `{"k": k, "V": series, "u": [series...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassJson {
    pub k: usize,
    pub trunc: usize,
    #[serde(rename = "V")]
    pub v: SeriesJson,
    pub u: Vec<SeriesJson>,
}

impl WeierstrassJson {
    pub fn to_form(&self) -> Result<WeierstrassForm, SeriesError> {
        Ok(WeierstrassForm {
            k: self.k,
            trunc: self.trunc,
            v: self.v.to_series()?,
            u: self.u.iter().map(SeriesJson::to_series).collect::<Result<_, _>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn series(d: usize, n: usize, terms: &[(&[u32], f64)]) -> MultiSeries {
        MultiSeries::from_real_terms(d, n, terms).unwrap()
    }

    /// `e^{t1}` in two variables.
    fn exp_t1(n: usize) -> MultiSeries {
        let mut fact = 1.0;
        let mut terms = Vec::new();
        for i in 0..=n {
            if i > 0 {
                fact *= i as f64;
            }
            terms.push((vec![i as u32, 0], c(1.0 / fact)));
        }
        MultiSeries::from_terms(2, n, terms).unwrap()
    }

    #[test]
    fn orders_of_vanishing() {
        assert_eq!(vanishing_order(&series(2, 6, &[(&[0, 2], 1.0), (&[1, 0], -1.0)])).unwrap(), 2);
        let e_t2 = exp_t1(6).mul(&series(2, 6, &[(&[0, 1], 1.0)])).unwrap();
        assert_eq!(vanishing_order(&e_t2).unwrap(), 1);
        assert_eq!(vanishing_order(&series(2, 6, &[(&[0, 3], 1.0), (&[1, 1], 1.0)])).unwrap(), 3);
        assert_eq!(
            vanishing_order(&series(2, 6, &[(&[1, 1], 1.0)])),
            Err(WeierstrassError::OrderUndetermined(6))
        );
    }

    #[test]
    fn already_a_weierstrass_polynomial() {
        let u = series(2, 8, &[(&[0, 2], 1.0), (&[1, 0], -1.0)]);
        let w = prepare(&u, 8).unwrap();
        assert_eq!(w.k, 2);
        assert!(w.v.max_abs_diff(&MultiSeries::one(2, 6)) < 1e-15);
        assert!(w.u[1].is_zero());
        assert!(w.u[0].max_abs_diff(&series(1, 8, &[(&[1], -1.0)])) < 1e-15);
    }

    #[test]
    fn unit_times_weierstrass_polynomial() {
        let n = 10;
        let p0 = series(2, n, &[(&[0, 2], 1.0), (&[2, 0], -1.0)]);
        let u = exp_t1(n).mul(&p0).unwrap();
        let w = prepare(&u, n).unwrap();
        assert_eq!(w.k, 2);
        assert!(w.v.max_abs_diff(&exp_t1(n - 2)) < 1e-13);
        assert!(w.u[1].is_zero());
        assert!(w.u[0].max_abs_diff(&series(1, n, &[(&[2], -1.0)])) < 1e-13);
        assert!(w.residual(&u).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn mixed_germ_residual_vanishes() {
        let u = series(2, 10, &[(&[0, 2], 1.0), (&[1, 1], 1.0), (&[3, 0], 1.0), (&[1, 2], 1.0)]);
        let w = prepare(&u, 10).unwrap();
        assert_eq!(w.k, 2);
        assert!(w.residual(&u).unwrap().max_abs() <= 1e-9);
        // dividing by the unit 1 + t1 gives u_1 = t1/(1+t1), u_0 = t1^3/(1+t1)
        for i in 1..=9u32 {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            assert!((w.u[1].coeff(&[i]) - c(sign)).norm() < 1e-12, "u1 at {i}");
        }
        assert!((w.u[0].coeff(&[3]) - c(1.0)).norm() < 1e-12);
        assert!((w.u[0].coeff(&[4]) - c(-1.0)).norm() < 1e-12);
        assert_eq!(w.v.constant_term(), c(1.0));
    }

    #[test]
    fn unit_constant_is_axis_coefficient() {
        let u = series(3, 6, &[(&[0, 0, 3], 2.5), (&[1, 0, 0], 1.0), (&[0, 1, 1], -0.5)]);
        let w = prepare(&u, 6).unwrap();
        assert_eq!(w.k, 3);
        assert_eq!(w.v.constant_term(), c(2.5));
        assert!(w.residual(&u).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn scaling_the_germ_scales_only_the_unit() {
        let u = series(2, 8, &[(&[0, 2], 1.0), (&[1, 1], 0.3), (&[2, 0], -0.7), (&[1, 2], 0.2), (&[0, 4], 0.5)]);
        let k = Complex64::new(-1.5, 2.0);
        let a = prepare(&u, 8).unwrap();
        let b = prepare(&u.scale(k), 8).unwrap();
        for (x, y) in a.u.iter().zip(&b.u) {
            assert!(x.max_abs_diff(y) < 1e-10);
        }
        assert!(a.v.scale(k).max_abs_diff(&b.v) < 1e-10);
    }

    #[test]
    fn slice_roots_of_simple_germs() {
        let u = series(2, 8, &[(&[0, 2], 1.0), (&[1, 0], -1.0)]);
        let w = prepare(&u, 8).unwrap();
        let mut r = w.slice_roots(&[c(0.01)]).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(-0.1)).norm() < 1e-14 && (r[1] - c(0.1)).norm() < 1e-14);
        assert_eq!(w.slice_roots(&[c(0.0)]).unwrap(), vec![c(0.0); 2]);
        assert!(w.slice_roots(&[c(0.0), c(1.0)]).is_err());

        let u = series(2, 8, &[(&[0, 2], 1.0), (&[2, 0], -1.0)]);
        let w = prepare(&u, 8).unwrap();
        let mut r = w.slice_roots(&[c(0.2)]).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(-0.2)).norm() < 1e-14 && (r[1] - c(0.2)).norm() < 1e-14);
    }

    #[test]
    fn needs_two_variables() {
        let u = series(1, 4, &[(&[2], 1.0)]);
        assert_eq!(prepare(&u, 4), Err(WeierstrassError::TooFewVariables(1)));
    }

    #[test]
    fn json_round_trip() {
        let u = series(2, 6, &[(&[0, 2], 1.0), (&[1, 1], 0.5), (&[1, 0], -1.0)]);
        let w = prepare(&u, 6).unwrap();
        let text = serde_json::to_string(&w.to_json()).unwrap();
        let back: WeierstrassJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_form().unwrap(), w);
    }
}
