//! Polynomial canonical forms of analytic germs and the one-variable
//! functional equation behind their uniqueness.
//!
//! - [`series`]: truncated power series, polynomials, roots and circle norms.
//! - [`weierstrass`]: order of vanishing and the Weierstrass preparation `U = V·P`.
//! - [`levinson`]: the representation `U = Σ v_j(t') x(t)^j` with a normalized
//!   auxiliary variable, plus executable uniqueness checks.
//! - [`functional`]: the averaged difference-quotient operator, its inverse,
//!   the stability constant and the root-containment / local-uniqueness checks
//!   for `∏(z - z_i) = ∏(y(z) - y(z_i))`.
//! - [`mixed`]: saddle-point estimates for coefficients of `∏ f_i(z)^{n_i}`.
//! - [`germs`]: random germs with known structure.
//! - [`cli`]: the JSON command-line front end.

pub mod cli;
pub mod functional;
pub mod germs;
pub mod levinson;
pub mod mixed;
pub mod series;
pub mod weierstrass;

pub use num_complex::Complex64;
