//! Truncated power series in one or several complex variables.
//!
//! [`MultiSeries`] stores coefficients sparsely, keyed by exponent multi-index,
//! and truncates by total degree. [`UniSeries`] is the dense univariate
//! counterpart and [`Poly`] a plain polynomial with a root finder attached.
//! Circle norms live in [`norm`].

mod json;
mod multi;
pub mod norm;
mod poly;
mod roots;
mod uni;

pub use json::SeriesJson;
pub use multi::{ArithOp, MultiSeries};
pub use norm::{circle_max, circle_min, circle_norm, DiskSpec, Evaluate};
pub use poly::Poly;
pub use roots::{cluster_roots, poly_roots, with_multiplicity, RootOptions};
pub use uni::UniSeries;

pub use num_complex::Complex64;

use thiserror::Error;

/// Coefficients with modulus at or below this are not stored.
pub const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("series has a vanishing constant term")]
    VanishingConstantTerm,
    #[error("inner series of a composition must have zero constant term")]
    NonzeroConstantTerm,
    #[error("series is not invertible: linear coefficient vanishes")]
    NonInvertibleJet,
    #[error("polynomial has a degenerate leading coefficient")]
    DegenerateLeading,
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("exponent {exponent:?} has length {len}, expected {nvars}")]
    IndexLength {
        exponent: Vec<u32>,
        len: usize,
        nvars: usize,
    },
    #[error("exponent {exponent:?} has total degree above truncation {trunc}")]
    DegreeAboveTruncation { exponent: Vec<u32>, trunc: usize },
    #[error("duplicate exponent {0:?}")]
    DuplicateIndex(Vec<u32>),
    #[error("non-finite coefficient at {0:?}")]
    NonFinite(Vec<u32>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("root iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T, E = SeriesError> = std::result::Result<T, E>;

/// Total degree of an exponent multi-index.
#[inline]
pub(crate) fn degree(exponent: &[u32]) -> usize {
    exponent.iter().map(|&e| e as usize).sum()
}

/// All exponent multi-indices in `nvars` variables of total degree exactly `deg`,
/// in lexicographic order.
pub fn monomials_of_degree(nvars: usize, deg: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, remaining: usize, left: usize, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(remaining as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e as u32);
            rec(prefix, remaining - e, left - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if deg == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(&mut Vec::with_capacity(nvars), deg, nvars, &mut out);
    out
}

/// All exponent multi-indices of total degree at most `deg`, grouped by degree.
pub fn degree_at_most(nvars: usize, deg: usize) -> Vec<Vec<u32>> {
    (0..=deg).flat_map(|m| monomials_of_degree(nvars, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(1, 4), vec![vec![4]]);
        assert_eq!(monomials_of_degree(2, 2).len(), 3);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(0, 0), vec![Vec::<u32>::new()]);
        assert!(monomials_of_degree(0, 1).is_empty());
        assert_eq!(degree_at_most(3, 8).len(), 165);
        for m in monomials_of_degree(3, 5) {
            assert_eq!(degree(&m), 5);
        }
    }
}
