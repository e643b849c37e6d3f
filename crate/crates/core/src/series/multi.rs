use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::{degree, Result, SeriesError, UniSeries, DROP_TOL};

/// Power series in `nvars` complex variables, truncated at total degree `trunc`.
///
/// Absent exponents stand for zero coefficients. Coefficients at or below
/// [`DROP_TOL`] in modulus are discarded on store.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSeries {
    nvars: usize,
    trunc: usize,
    coeffs: BTreeMap<Vec<u32>, Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl MultiSeries {
    pub fn zero(nvars: usize, trunc: usize) -> Self {
        assert!(nvars >= 1, "series needs at least one variable");
        MultiSeries {
            nvars,
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, trunc: usize, c: Complex64) -> Self {
        let mut s = Self::zero(nvars, trunc);
        s.set(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, trunc: usize) -> Self {
        Self::constant(nvars, trunc, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `t_index`.
    pub fn variable(nvars: usize, trunc: usize, index: usize) -> Result<Self> {
        if index >= nvars {
            return Err(SeriesError::VariableOutOfRange { index, nvars });
        }
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut s = Self::zero(nvars, trunc);
        s.set(e, Complex64::new(1.0, 0.0));
        Ok(s)
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated exponents
    /// are summed; use [`super::SeriesJson`] when duplicates must be rejected.
    pub fn from_terms<I>(nvars: usize, trunc: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        if nvars == 0 {
            return Err(SeriesError::InvalidArgument("nvars must be positive".into()));
        }
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(SeriesError::IndexLength {
                    len: e.len(),
                    exponent: e,
                    nvars,
                });
            }
            if degree(&e) > trunc {
                return Err(SeriesError::DegreeAboveTruncation { exponent: e, trunc });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(SeriesError::NonFinite(e));
            }
            *acc.entry(e).or_default() += c;
        }
        let mut s = Self::zero(nvars, trunc);
        for (e, c) in acc {
            s.set(e, c);
        }
        Ok(s)
    }

    /// Real-coefficient convenience wrapper around [`Self::from_terms`].
    pub fn from_real_terms(nvars: usize, trunc: usize, terms: &[(&[u32], f64)]) -> Result<Self> {
        Self::from_terms(
            nvars,
            trunc,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), Complex64::new(*c, 0.0))),
        )
    }

    /// Embeds a univariate series as a series in `nvars` variables depending
    /// only on variable `var`.
    pub fn from_uni(u: &UniSeries, nvars: usize, var: usize) -> Result<Self> {
        if var >= nvars {
            return Err(SeriesError::VariableOutOfRange { index: var, nvars });
        }
        let mut s = Self::zero(nvars, u.trunc());
        for (n, &c) in u.coeffs().iter().enumerate() {
            let mut e = vec![0; nvars];
            e[var] = n as u32;
            s.set(e, c);
        }
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Number of stored (nonzero) coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> + '_ {
        self.coeffs.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exponent: &[u32]) -> Complex64 {
        self.coeffs.get(exponent).copied().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&vec![0; self.nvars])
    }

    /// Stores `c` at `exponent`, dropping it when negligible or beyond the
    /// truncation.
    pub(crate) fn set(&mut self, exponent: Vec<u32>, c: Complex64) {
        debug_assert_eq!(exponent.len(), self.nvars);
        if degree(&exponent) > self.trunc || c.norm() <= DROP_TOL {
            self.coeffs.remove(&exponent);
        } else {
            self.coeffs.insert(exponent, c);
        }
    }

    pub(crate) fn add_to(&mut self, exponent: Vec<u32>, c: Complex64) {
        let cur = self.coeff(&exponent);
        self.set(exponent, cur + c);
    }

    /// Same coefficients, relabelled with truncation `trunc`. Lowering drops
    /// terms above the new order; raising declares the missing ones zero.
    pub fn with_trunc(&self, trunc: usize) -> Self {
        MultiSeries {
            nvars: self.nvars,
            trunc,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| degree(e) <= trunc)
                .map(|(e, &c)| (e.clone(), c))
                .collect(),
        }
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(SeriesError::DimensionMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        match op {
            ArithOp::Add => self.add(other),
            ArithOp::Sub => self.sub(other),
            ArithOp::Mul => self.mul(other),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (e, c) in self.terms().chain(other.terms()) {
            if degree(e) <= trunc {
                *acc.entry(e.to_vec()).or_default() += c;
            }
        }
        Ok(self.collect(trunc, acc))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut s = Self::zero(self.nvars, self.trunc);
        for (e, c) in self.terms() {
            s.set(e.to_vec(), c * k);
        }
        s
    }

    /// Cauchy product truncated at the smaller of the two truncations.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_poly(other, self.trunc.min(other.trunc))
    }

    /// Product of the stored coefficients as polynomials, keeping total degree
    /// up to `trunc` regardless of the operands' own truncations.
    pub fn mul_poly(&self, other: &Self, trunc: usize) -> Result<Self> {
        self.check_dims(other)?;
        let mut rhs: Vec<(usize, &[u32], Complex64)> =
            other.terms().map(|(e, c)| (degree(e), e, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (ea, ca) in self.terms() {
            let da = degree(ea);
            if da > trunc {
                continue;
            }
            for &(db, eb, cb) in &rhs {
                if da + db > trunc {
                    break;
                }
                let key: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(key).or_default() += ca * cb;
            }
        }
        Ok(self.collect(trunc, acc))
    }

    fn collect(&self, trunc: usize, acc: BTreeMap<Vec<u32>, Complex64>) -> Self {
        let mut s = Self::zero(self.nvars, trunc);
        for (e, c) in acc {
            s.set(e, c);
        }
        s
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(self.nvars, self.trunc);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base).expect("same dimensions");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same dimensions");
            }
        }
        result
    }

    /// Terms of total degree exactly `deg`.
    pub fn homogeneous_part(&self, deg: usize) -> Self {
        let mut s = Self::zero(self.nvars, self.trunc);
        for (e, c) in self.terms() {
            if degree(e) == deg {
                s.set(e.to_vec(), c);
            }
        }
        s
    }

    fn homogeneous_parts(&self) -> Vec<Self> {
        let mut parts = vec![Self::zero(self.nvars, self.trunc); self.trunc + 1];
        for (e, c) in self.terms() {
            parts[degree(e)].set(e.to_vec(), c);
        }
        parts
    }

    /// Multiplicative inverse, computed homogeneous degree by homogeneous degree.
    pub fn reciprocal(&self) -> Result<Self> {
        let f0 = self.constant_term();
        if f0.norm() <= DROP_TOL {
            return Err(SeriesError::VanishingConstantTerm);
        }
        let n = self.trunc;
        let f = self.homogeneous_parts();
        let mut g: Vec<Self> = Vec::with_capacity(n + 1);
        g.push(Self::constant(self.nvars, n, f0.inv()));
        for m in 1..=n {
            let mut acc = Self::zero(self.nvars, n);
            for j in 1..=m {
                if f[j].is_zero() || g[m - j].is_zero() {
                    continue;
                }
                acc = acc.add(&f[j].mul_poly(&g[m - j], n)?)?;
            }
            g.push(acc.scale(-f0.inv()));
        }
        Ok(sum_parts(self.nvars, n, g))
    }

    /// An `m`-th root `g` with `g^m = self`. `branch` picks which root of the
    /// constant term seeds the expansion: `|f0|^(1/m) * exp(i (arg f0 + 2 pi branch) / m)`.
    pub fn nth_root(&self, m: u32, branch: u32) -> Result<Self> {
        if m == 0 {
            return Err(SeriesError::InvalidArgument("root order must be positive".into()));
        }
        let f0 = self.constant_term();
        if f0.norm() <= DROP_TOL {
            return Err(SeriesError::VanishingConstantTerm);
        }
        let n = self.trunc;
        let h = self.scale(f0.inv()).homogeneous_parts();
        let alpha = 1.0 / m as f64;
        // Euler-operator recurrence for h^alpha with h(0) = 1:
        // n g_n = sum_{j>=1} (alpha j - (n - j)) h_j g_{n-j}
        let mut g: Vec<Self> = Vec::with_capacity(n + 1);
        g.push(Self::one(self.nvars, n));
        for deg in 1..=n {
            let mut acc = Self::zero(self.nvars, n);
            for j in 1..=deg {
                if h[j].is_zero() || g[deg - j].is_zero() {
                    continue;
                }
                let w = alpha * j as f64 - (deg - j) as f64;
                acc = acc.add(&h[j].mul_poly(&g[deg - j], n)?.scale(w.into()))?;
            }
            g.push(acc.scale((1.0 / deg as f64).into()));
        }
        let root = Complex64::from_polar(
            f0.norm().powf(alpha),
            (f0.arg() + 2.0 * PI * (branch % m) as f64) * alpha,
        );
        Ok(sum_parts(self.nvars, n, g).scale(root))
    }

    /// Formal partial derivative with respect to variable `var`; the result is
    /// truncated one order lower.
    pub fn partial_derivative(&self, var: usize) -> Result<Self> {
        if var >= self.nvars {
            return Err(SeriesError::VariableOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut s = Self::zero(self.nvars, self.trunc.saturating_sub(1));
        for (e, c) in self.terms() {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.to_vec();
            d[var] -= 1;
            s.set(d, c * e[var] as f64);
        }
        Ok(s)
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(SeriesError::DimensionMismatch {
                left: self.nvars,
                right: point.len(),
            });
        }
        Ok(self
            .terms()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c, |acc, (&k, z)| acc * z.powu(k))
            })
            .sum())
    }

    /// Substitutes the first `nvars - 1` variables by `point` and returns the
    /// resulting series in the last variable, with the same truncation.
    pub fn slice_last(&self, point: &[Complex64]) -> Result<UniSeries> {
        if point.len() + 1 != self.nvars {
            return Err(SeriesError::DimensionMismatch {
                left: self.nvars - 1,
                right: point.len(),
            });
        }
        let d = self.nvars - 1;
        let mut coeffs = vec![Complex64::default(); self.trunc + 1];
        for (e, c) in self.terms() {
            let w = e[..d]
                .iter()
                .zip(point)
                .fold(c, |acc, (&k, z)| acc * z.powu(k));
            coeffs[e[d] as usize] += w;
        }
        Ok(UniSeries::new(coeffs))
    }

    /// Coefficients of `t_d^n` at `t' = 0`, for `n = 0..=trunc`.
    pub fn axis_coeffs(&self) -> Vec<Complex64> {
        let d = self.nvars - 1;
        let mut out = vec![Complex64::default(); self.trunc + 1];
        for (e, c) in self.terms() {
            if e[..d].iter().all(|&k| k == 0) {
                out[e[d] as usize] = c;
            }
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficientwise deviation over total degrees both operands know.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let trunc = self.trunc.min(other.trunc);
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .filter(|e| degree(e) <= trunc)
            .map(|e| (self.coeff(e) - other.coeff(e)).norm())
            .fold(0.0, f64::max)
    }
}

fn sum_parts(nvars: usize, trunc: usize, parts: Vec<MultiSeries>) -> MultiSeries {
    let mut s = MultiSeries::zero(nvars, trunc);
    for p in parts {
        for (e, c) in p.coeffs {
            s.set(e, c);
        }
    }
    s
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·t{}", v + 1)?,
                    _ => write!(f, "·t{}^{}", v + 1, k)?,
                }
            }
        }
        write!(f, " + O({})", self.trunc + 1)
    }
}
