//! Levinson's representation `U = Σ_{j=0}^k v_j(t') · x(t)^j`.
//!
//! The auxiliary variable is normalized by `x(t', 0) = 0` and
//! `∂x/∂t_d(t', 0) = 1`; these are imposed, never solved for. Two solvers are
//! provided: [`decompose`] works grade by grade in `t'` with a small LU solve
//! per monomial, and [`decompose_newton`] runs Newton's method on the whole
//! coefficient system at once. Agreement of the two is the executable form of
//! uniqueness; [`transfer_y`] and [`bridge_deviation`] replay the transfer
//! construction between two representations of the same germ.

mod newton;
mod transfer;

pub use newton::{decompose_newton, decompose_newton_with_stats};
pub use transfer::{bridge_deviation, transfer_y};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{monomials_of_degree, MultiSeries, SeriesError, SeriesJson, UniSeries};
use crate::weierstrass::{drop_last, exponent, lift, vanishing_order, WeierstrassError};

/// Pivot ratio below which a grade system counts as singular.
pub const SINGULAR_RATIO: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevinsonError {
    #[error("germ does not vanish at the origin")]
    ZeroOrder,
    #[error("truncation/conditioning failure at grade {grade}: pivot ratio {ratio:e}")]
    Singular { grade: usize, ratio: f64 },
    #[error("Newton iteration stalled after {iterations} steps with residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("branch selection failure: arg(v_k/w_k) = {0}")]
    BranchCut(f64),
    #[error(transparent)]
    Weierstrass(#[from] WeierstrassError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `v_0..v_k` in `t'` (`v_j` truncated at `trunc - j`) and `x` in all
/// variables (truncated at `trunc - k + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonForm {
    pub k: usize,
    pub v: Vec<MultiSeries>,
    pub x: MultiSeries,
    pub trunc: usize,
}

/// Diagnostics of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveStats {
    /// Smallest `min |u_ii| / max |u_ii|` over all LU factorizations.
    pub pivot_ratio: f64,
    /// Newton steps taken; 0 for the graded solver.
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub v_match: bool,
    pub x_match: bool,
    pub max_dev: f64,
}

/// Checked inputs shared by both solvers.
pub(crate) struct Problem {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub lead: Complex64,
    pub target: MultiSeries,
}

impl Problem {
    pub fn new(u: &MultiSeries, trunc: usize) -> Result<Self, LevinsonError> {
        let d = u.nvars();
        if d < 2 {
            return Err(WeierstrassError::TooFewVariables(d).into());
        }
        let n = trunc.min(u.trunc());
        let target = u.with_trunc(n);
        let k = vanishing_order(&target)?;
        if k == 0 {
            return Err(LevinsonError::ZeroOrder);
        }
        let lead = target.axis_coeffs()[k];
        Ok(Problem { d, n, k, lead, target })
    }

    pub fn x_trunc(&self) -> usize {
        self.n + 1 - self.k
    }

    /// `x(0', t_d) = t_d (U(0', t_d) / (v_k(0') t_d^k))^{1/k}` on the principal branch.
    pub fn axis_x(&self) -> Result<UniSeries, SeriesError> {
        let axis = self.target.axis_coeffs();
        let quotient = UniSeries::new(axis[self.k..].iter().map(|c| c / self.lead).collect());
        let root = UniSeries::from_multi(&quotient.to_multi().nth_root(self.k as u32, 0)?)?;
        let mut coeffs = vec![Complex64::default()];
        coeffs.extend_from_slice(root.coeffs());
        Ok(UniSeries::new(coeffs))
    }

    pub fn finish(&self, v: &[MultiSeries], x: MultiSeries) -> Result<LevinsonForm, SeriesError> {
        let v = v
            .iter()
            .enumerate()
            .map(|(j, s)| drop_last(s, self.n - j))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LevinsonForm { k: self.k, v, x, trunc: self.n })
    }
}

/// `Σ v_j x^j` through total degree `trunc`, with `v_j` given in all variables.
pub(crate) fn expand(v: &[MultiSeries], x: &MultiSeries, trunc: usize) -> Result<MultiSeries, SeriesError> {
    let mut acc = MultiSeries::zero(x.nvars(), trunc);
    let mut power = MultiSeries::one(x.nvars(), trunc);
    for (j, vj) in v.iter().enumerate() {
        if j > 0 {
            power = power.mul_poly(x, trunc)?;
        }
        acc = acc.add(&vj.mul_poly(&power, trunc)?)?;
    }
    Ok(acc)
}

/// Solves `a · z = b` by LU with partial pivoting, returning the pivot ratio.
pub(crate) fn lu_solve(a: DMatrix<Complex64>, b: DVector<Complex64>) -> Option<(DVector<Complex64>, f64)> {
    let lu = a.lu();
    let diag = lu.u().diagonal();
    let big = diag.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let small = diag.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
    let ratio = if big > 0.0 { small / big } else { 0.0 };
    let z = lu.solve(&b)?;
    Some((z, ratio))
}

/// Graded solve of Levinson's representation through total degree `min(trunc, u.trunc())`.
pub fn decompose(u: &MultiSeries, trunc: usize) -> Result<LevinsonForm, LevinsonError> {
    decompose_with_stats(u, trunc).map(|(form, _)| form)
}

pub fn decompose_with_stats(
    u: &MultiSeries,
    trunc: usize,
) -> Result<(LevinsonForm, SolveStats), LevinsonError> {
    let pb = Problem::new(u, trunc)?;
    let (d, n, k) = (pb.d, pb.n, pb.k);
    let zero_alpha = vec![0; d - 1];

    let x0 = pb.axis_x()?.with_trunc(pb.x_trunc());
    let mut x = MultiSeries::zero(d, pb.x_trunc());
    for (e, &c) in x0.coeffs().iter().enumerate() {
        x.set(exponent(&zero_alpha, e), c);
    }
    let mut v = vec![MultiSeries::zero(d, n); k + 1];
    v[k].set(vec![0; d], pb.lead);

    // linearization at grade 0: columns t_d^n ↦ x0^j and x ↦ k v_k(0') x0^(k-1)
    let x0n = x0.with_trunc(n);
    let mut powers = vec![UniSeries::constant(n, Complex64::new(1.0, 0.0))];
    for j in 1..=k {
        powers.push(powers[j - 1].mul_trunc(&x0n, n));
    }
    let slope = powers[k - 1].scale(pb.lead * k as f64);

    let mut pivot_ratio = 1.0f64;
    for m in 1..=n {
        let residual = pb.target.sub(&expand(&v, &x, n)?)?;
        let depth = n - m;
        let nv = k.min(depth) + 1;
        let size = depth + 1;
        let a = DMatrix::from_fn(size, size, |row, col| {
            if col < nv {
                powers[col].coeff(row)
            } else {
                let e = col - nv + 2;
                if row >= e {
                    slope.coeff(row - e)
                } else {
                    Complex64::default()
                }
            }
        });
        for alpha in monomials_of_degree(d - 1, m) {
            let b = DVector::from_fn(size, |row, _| residual.coeff(&exponent(&alpha, row)));
            let (z, ratio) = lu_solve(a.clone(), b).ok_or(LevinsonError::Singular { grade: m, ratio: 0.0 })?;
            if ratio < SINGULAR_RATIO {
                return Err(LevinsonError::Singular { grade: m, ratio });
            }
            pivot_ratio = pivot_ratio.min(ratio);
            for (j, vj) in v.iter_mut().enumerate().take(nv) {
                vj.set(exponent(&alpha, 0), z[j]);
            }
            for col in nv..size {
                x.set(exponent(&alpha, col - nv + 2), z[col]);
            }
        }
    }
    let stats = SolveStats { pivot_ratio, iterations: 0 };
    Ok((pb.finish(&v, x)?, stats))
}

impl LevinsonForm {
    pub fn nvars(&self) -> usize {
        self.x.nvars()
    }

    /// `v_j` as series in all `d` variables.
    pub fn v_lifted(&self) -> Vec<MultiSeries> {
        self.v.iter().map(|s| lift(s, self.trunc)).collect()
    }

    /// `Σ v_j x^j` through total degree `trunc`.
    pub fn expand(&self) -> Result<MultiSeries, SeriesError> {
        expand(&self.v_lifted(), &self.x, self.trunc)
    }

    /// `U - Σ v_j x^j` through total degree `trunc`.
    pub fn residual(&self, u: &MultiSeries) -> Result<MultiSeries, SeriesError> {
        u.with_trunc(self.trunc).sub(&self.expand()?)
    }

    /// `x(t', 0) = 0` and the `t_d`-linear block of `x` is exactly `t_d`.
    pub fn is_normalized(&self) -> bool {
        let d = self.nvars();
        let linear = exponent(&vec![0; d - 1], 1);
        self.x.coeff(&linear) == Complex64::new(1.0, 0.0)
            && self.x.terms().all(|(e, _)| match e[d - 1] {
                0 => false,
                1 => e == linear.as_slice(),
                _ => true,
            })
    }

    /// Coefficientwise comparison of two representations.
    pub fn uniqueness_check(&self, other: &Self, tol: f64) -> Result<UniquenessReport, LevinsonError> {
        if self.k != other.k || self.nvars() != other.nvars() || self.trunc != other.trunc {
            return Err(LevinsonError::ShapeMismatch(format!(
                "(k, d, N) = ({}, {}, {}) vs ({}, {}, {})",
                self.k,
                self.nvars(),
                self.trunc,
                other.k,
                other.nvars(),
                other.trunc
            )));
        }
        let v_dev = self
            .v
            .iter()
            .zip(&other.v)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        let x_dev = self.x.max_abs_diff(&other.x);
        Ok(UniquenessReport {
            v_match: v_dev <= tol,
            x_match: x_dev <= tol,
            max_dev: v_dev.max(x_dev),
        })
    }

    pub fn to_json(&self) -> LevinsonJson {
        LevinsonJson {
            k: self.k,
            trunc: self.trunc,
            v: self.v.iter().map(SeriesJson::from).collect(),
            x: SeriesJson::from(&self.x),
        }
    }
}

/// Wire form `{"k": k, "v": [series...], "x": series}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevinsonJson {
    pub k: usize,
    pub trunc: usize,
    pub v: Vec<SeriesJson>,
    pub x: SeriesJson,
}

impl LevinsonJson {
    pub fn to_form(&self) -> Result<LevinsonForm, LevinsonError> {
        let x = self.x.to_series()?;
        let v = self
            .v
            .iter()
            .map(SeriesJson::to_series)
            .collect::<Result<Vec<_>, _>>()?;
        if v.len() != self.k + 1 {
            return Err(LevinsonError::ShapeMismatch(format!(
                "expected {} coefficient series, got {}",
                self.k + 1,
                v.len()
            )));
        }
        if x.nvars() < 2 || v.iter().any(|s| s.nvars() + 1 != x.nvars()) {
            return Err(LevinsonError::ShapeMismatch(
                "coefficients must have one variable fewer than x".into(),
            ));
        }
        Ok(LevinsonForm { k: self.k, v, x, trunc: self.trunc })
    }
}
