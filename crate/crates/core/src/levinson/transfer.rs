//! Transfer between two representations `U = Σ v_j s^j = Σ w_j t^j`.
//!
//! With `Φ(t) = (t', s(t))`, the variable `x = t ∘ Φ^{-1}` satisfies
//! `Σ v_j z^j = Σ w_j x^j`, and `y = x · (v_k / w_k)^{-1/k}` is the map that
//! the functional equation forces to be the identity.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{LevinsonError, LevinsonForm};
use crate::series::{MultiSeries, UniSeries};
use crate::weierstrass::{exponent, prepare};

/// Largest `|arg(v_k / w_k)|` for which the principal root is accepted.
pub const BRANCH_LIMIT: f64 = 0.75 * PI;

fn check_shapes(a: &LevinsonForm, b: &LevinsonForm) -> Result<(), LevinsonError> {
    if a.k != b.k || a.nvars() != b.nvars() {
        return Err(LevinsonError::ShapeMismatch(format!(
            "(k, d) = ({}, {}) vs ({}, {})",
            a.k,
            a.nvars(),
            b.k,
            b.nvars()
        )));
    }
    Ok(())
}

/// `z ↦ x_B(t', s_A^{-1}(z)) · (v_k(t') / w_k(t'))^{-1/k}` at a fixed `t'`.
///
/// The root is taken on the branch continuous from `t' = 0`, where the ratio
/// is 1; ratios too far from the positive axis are reported, not guessed.
pub fn transfer_y(
    a: &LevinsonForm,
    b: &LevinsonForm,
    point: &[Complex64],
    trunc: usize,
) -> Result<UniSeries, LevinsonError> {
    check_shapes(a, b)?;
    let n = trunc.min(a.x.trunc()).min(b.x.trunc());
    let s = a.x.slice_last(point)?.with_trunc(n);
    let s_inv = s.revert()?;
    let xb = b.x.slice_last(point)?.with_trunc(n);
    let x = xb.compose(&s_inv)?;
    let ratio = a.v[a.k].eval(point)? / b.v[b.k].eval(point)?;
    if ratio.arg().abs() > BRANCH_LIMIT || !ratio.is_finite() {
        return Err(LevinsonError::BranchCut(ratio.arg()));
    }
    Ok(x.scale(ratio.powf(-1.0 / a.k as f64)))
}

/// `Σ v_j(t') t_d^j` as a germ in all variables.
fn polynomial_germ(form: &LevinsonForm) -> MultiSeries {
    let d = form.nvars();
    let mut out = MultiSeries::zero(d, form.trunc);
    for (j, vj) in form.v_lifted().iter().enumerate() {
        for (e, c) in vj.terms() {
            let e = exponent(&e[..d - 1], j);
            if e.iter().map(|&x| x as usize).sum::<usize>() <= form.trunc {
                out.add_to(e, c);
            }
        }
    }
    out
}

/// Coefficientwise gap between `Π (z - z_j)` and `Π (y(z) - y(z_j))`, where
/// `z_j` are the roots of `Σ v_j(t') z^j` near 0 and `y` is [`transfer_y`].
pub fn bridge_deviation(
    a: &LevinsonForm,
    b: &LevinsonForm,
    point: &[Complex64],
    trunc: usize,
) -> Result<f64, LevinsonError> {
    let roots = prepare(&polynomial_germ(a), a.trunc)?.slice_roots(point)?;
    let y = transfer_y(a, b, point, trunc)?;
    let n = y.trunc();
    let one = UniSeries::constant(n, Complex64::new(1.0, 0.0));
    let z = UniSeries::identity(n);
    let mut lhs = one.clone();
    let mut rhs = one.clone();
    for &r in &roots {
        lhs = lhs.mul_trunc(&(&z - &one.scale(r)), n);
        rhs = rhs.mul_trunc(&(&y - &one.scale(y.eval(r))), n);
    }
    Ok(lhs.max_abs_diff(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levinson::{decompose, decompose_newton};

    fn germ() -> MultiSeries {
        MultiSeries::from_terms(
            3,
            7,
            vec![
                (vec![0, 0, 2], Complex64::new(0.9, -0.2)),
                (vec![1, 0, 0], Complex64::new(0.5, 0.0)),
                (vec![0, 1, 1], Complex64::new(0.0, 0.4)),
                (vec![1, 1, 1], Complex64::new(-0.3, 0.0)),
                (vec![0, 0, 3], Complex64::new(0.2, 0.1)),
                (vec![2, 0, 2], Complex64::new(0.35, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn self_transfer_is_identity() {
        let a = decompose(&germ(), 7).unwrap();
        let p = [Complex64::new(0.03, 0.01), Complex64::new(-0.02, 0.0)];
        let y = transfer_y(&a, &a, &p, 7).unwrap();
        assert!(y.max_abs_diff(&UniSeries::identity(y.trunc())) < 1e-13);
        let y0 = transfer_y(&a, &a, &[Complex64::default(); 2], 7).unwrap();
        assert!(y0.max_abs_diff(&UniSeries::identity(y0.trunc())) < 1e-15);
    }

    #[test]
    fn independent_solves_transfer_to_identity() {
        let a = decompose(&germ(), 7).unwrap();
        let b = decompose_newton(&germ(), 7).unwrap();
        let p = [Complex64::new(0.05, 0.0), Complex64::new(0.0, -0.04)];
        let y = transfer_y(&a, &b, &p, 7).unwrap();
        assert!(y.max_abs_diff(&UniSeries::identity(y.trunc())) < 1e-10);
        assert!(bridge_deviation(&a, &b, &p, 7).unwrap() < 1e-10);
    }

    #[test]
    fn opposite_leading_coefficients_are_rejected() {
        let a = decompose(&germ(), 7).unwrap();
        let mut b = a.clone();
        b.v[2] = b.v[2].scale(Complex64::new(-1.0, 0.0));
        let p = [Complex64::default(); 2];
        assert!(matches!(transfer_y(&a, &b, &p, 7), Err(LevinsonError::BranchCut(_))));
    }
}
