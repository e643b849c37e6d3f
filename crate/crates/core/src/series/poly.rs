use num_complex::Complex64;

use super::{poly_roots, Result, RootOptions, SeriesError, UniSeries};

/// Leading coefficients at or below this fraction of the largest coefficient
/// count as vanished.
const LEADING_TOL: f64 = 1e-14;

/// Dense polynomial `a_0 + a_1 z + ... + a_k z^k` with `a_k != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        match coeffs.last() {
            Some(lead) if lead.norm() > LEADING_TOL * scale && scale > 0.0 => Ok(Poly { coeffs }),
            _ => Err(SeriesError::DegenerateLeading),
        }
    }

    /// Drops trailing negligible coefficients before validating.
    pub fn trimmed(mut coeffs: Vec<Complex64>) -> Result<Self> {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= LEADING_TOL * scale) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut c = vec![lead];
        for &r in roots {
            let mut next = vec![Complex64::default(); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Poly { coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// Formal derivative; the derivative of a constant is the constant zero,
    /// which is returned as raw coefficients since it is not a valid `Poly`.
    pub fn derivative_coeffs(&self) -> Vec<Complex64> {
        if self.coeffs.len() == 1 {
            return vec![Complex64::default()];
        }
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| c * n as f64)
            .collect()
    }

    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Poly {
            coeffs: self.coeffs.iter().map(|&c| c / lead).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::default(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly { coeffs: out }
    }

    /// Roots with multiplicity, using the default [`RootOptions`].
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        poly_roots(self, &RootOptions::default())
    }

    /// `Q ∘ y` as a truncated series (Horner with series arithmetic).
    pub fn compose_series(&self, y: &UniSeries) -> UniSeries {
        let trunc = y.trunc();
        let mut acc = UniSeries::zero(trunc);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_trunc(y, trunc);
            acc = &acc + &UniSeries::constant(trunc, c);
        }
        acc
    }

    pub fn to_series(&self, trunc: usize) -> UniSeries {
        UniSeries::new(self.coeffs.clone()).with_trunc(trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_leading_rejected() {
        assert_eq!(Poly::from_real(&[1.0, 0.0]), Err(SeriesError::DegenerateLeading));
        assert_eq!(Poly::from_real(&[0.0]), Err(SeriesError::DegenerateLeading));
        assert_eq!(Poly::trimmed(vec![Complex64::new(1.0, 0.0), Complex64::default()]).unwrap().degree(), 0);
    }

    #[test]
    fn from_roots_expands() {
        let one = Complex64::new(1.0, 0.0);
        let p = Poly::from_roots(&[one, one * 2.0, one * 3.0], one);
        assert_eq!(p, Poly::from_real(&[-6.0, 11.0, -6.0, 1.0]).unwrap());
    }

    #[test]
    fn composition_with_series() {
        // (z + z^2)^2 truncated at 2 is z^2
        let q = Poly::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let y = UniSeries::from_real(&[0.0, 1.0, 1.0]);
        assert_eq!(q.compose_series(&y), UniSeries::from_real(&[0.0, 0.0, 1.0]));
    }
}
