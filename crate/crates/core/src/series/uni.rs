use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{MultiSeries, Result, SeriesError, DROP_TOL};

/// Dense univariate series `c_0 + c_1 z + ... + c_N z^N + O(z^(N+1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniSeries {
    coeffs: Vec<Complex64>,
}

impl UniSeries {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        UniSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(trunc: usize) -> Self {
        Self::new(vec![Complex64::default(); trunc + 1])
    }

    pub fn constant(trunc: usize, c: Complex64) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    /// The identity series `z`.
    pub fn identity(trunc: usize) -> Self {
        Self::monomial(trunc, 1, Complex64::new(1.0, 0.0))
    }

    /// `c z^n`, or zero when `n` exceeds the truncation.
    pub fn monomial(trunc: usize, n: usize, c: Complex64) -> Self {
        let mut s = Self::zero(trunc);
        if n <= trunc {
            s.coeffs[n] = c;
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Truncates or zero-pads to order `trunc`.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(trunc + 1, Complex64::default());
        Self::new(c)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::default();
        let mut dp = Complex64::default();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Formal derivative, one order lower (order 0 stays at order 0).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &c)| c * n as f64)
                .collect(),
        )
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Cauchy product truncated at the smaller truncation.
    pub fn mul_trunc(&self, other: &Self, trunc: usize) -> Self {
        let mut out = vec![Complex64::default(); trunc + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(trunc + 1) {
            if a == Complex64::default() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(trunc + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let trunc = self.trunc();
        let mut result = Self::constant(trunc, Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_trunc(&base, trunc);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_trunc(&base, trunc);
            }
        }
        result
    }

    pub fn reciprocal(&self) -> Result<Self> {
        let f0 = self.coeffs[0];
        if f0.norm() <= DROP_TOL {
            return Err(SeriesError::VanishingConstantTerm);
        }
        let inv = f0.inv();
        let mut g = vec![inv];
        for n in 1..=self.trunc() {
            let s: Complex64 = (1..=n).map(|j| self.coeffs[j] * g[n - j]).sum();
            g.push(-s * inv);
        }
        Ok(Self::new(g))
    }

    /// `self ∘ inner`, truncated at the smaller truncation.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.coeffs[0].norm() > DROP_TOL {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let trunc = self.trunc().min(inner.trunc());
        let mut inner = inner.with_trunc(trunc);
        inner.coeffs[0] = Complex64::default();
        let mut acc = Self::zero(trunc);
        for &c in self.coeffs.iter().take(trunc + 1).rev() {
            acc = acc.mul_trunc(&inner, trunc);
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Compositional inverse: `g` with `self ∘ g = g ∘ self = z + O(z^(N+1))`.
    pub fn revert(&self) -> Result<Self> {
        if self.coeffs[0].norm() > DROP_TOL {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let n = self.trunc();
        let f1 = self.coeff(1);
        if f1.norm() <= DROP_TOL {
            return Err(SeriesError::NonInvertibleJet);
        }
        let mut g = Self::zero(n);
        if n == 0 {
            return Ok(g);
        }
        g.coeffs[1] = f1.inv();
        // [z^m] f(g) picks up g_m only through f_1 g_m; every other
        // contribution involves lower coefficients of g.
        for m in 2..=n {
            let partial = self.with_trunc(m).compose(&g.with_trunc(m))?;
            g.coeffs[m] = -partial.coeffs[m] / f1;
        }
        Ok(g)
    }

    /// Largest coefficientwise deviation over the common orders.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.trunc().min(other.trunc());
        (0..=n)
            .map(|i| (self.coeffs[i] - other.coeffs[i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_multi(&self) -> MultiSeries {
        MultiSeries::from_uni(self, 1, 0).expect("variable 0 exists")
    }

    /// Reads a one-variable [`MultiSeries`] densely.
    pub fn from_multi(s: &MultiSeries) -> Result<Self> {
        if s.nvars() != 1 {
            return Err(SeriesError::DimensionMismatch {
                left: 1,
                right: s.nvars(),
            });
        }
        let mut coeffs = vec![Complex64::default(); s.trunc() + 1];
        for (e, c) in s.terms() {
            coeffs[e[0] as usize] = c;
        }
        Ok(Self::new(coeffs))
    }
}

impl Add for &UniSeries {
    type Output = UniSeries;
    fn add(self, rhs: &UniSeries) -> UniSeries {
        let n = self.trunc().min(rhs.trunc());
        UniSeries::new((0..=n).map(|i| self.coeffs[i] + rhs.coeffs[i]).collect())
    }
}

impl Sub for &UniSeries {
    type Output = UniSeries;
    fn sub(self, rhs: &UniSeries) -> UniSeries {
        let n = self.trunc().min(rhs.trunc());
        UniSeries::new((0..=n).map(|i| self.coeffs[i] - rhs.coeffs[i]).collect())
    }
}

impl Mul for &UniSeries {
    type Output = UniSeries;
    fn mul(self, rhs: &UniSeries) -> UniSeries {
        self.mul_trunc(rhs, self.trunc().min(rhs.trunc()))
    }
}

impl Neg for &UniSeries {
    type Output = UniSeries;
    fn neg(self) -> UniSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
