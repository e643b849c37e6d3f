//! Random germs for tests and benchmarks.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::series::{degree_at_most, MultiSeries, SeriesError};

fn unit_square<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn annulus<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..TAU))
}

/// A germ in `d` variables of order exactly `k` in the last one. The
/// monomial `t^e` gets a coefficient from the unit square times
/// `decay^{|e|}`, except the axis terms `t_d^j`, `j < k`, which vanish, and
/// `t_d^k`, which has modulus in `[0.5, 1.5]`.
pub fn random_germ<R: Rng>(
    rng: &mut R,
    d: usize,
    k: usize,
    trunc: usize,
    decay: f64,
) -> Result<MultiSeries, SeriesError> {
    let mut terms = Vec::new();
    for e in degree_at_most(d, trunc) {
        let on_axis = e[..d - 1].iter().all(|&a| a == 0);
        let n = e[d - 1] as usize;
        let c = match (on_axis, n.cmp(&k)) {
            (true, std::cmp::Ordering::Less) => continue,
            (true, std::cmp::Ordering::Equal) => annulus(rng, 0.5, 1.5),
            _ => unit_square(rng) * decay.powi(e.iter().sum::<u32>() as i32),
        };
        terms.push((e, c));
    }
    MultiSeries::from_terms(d, trunc, terms)
}

/// `U = V_0 · P_0` with both factors known.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredGerm {
    pub u: MultiSeries,
    /// The unit, truncated at `trunc - k`.
    pub v0: MultiSeries,
    /// `u_j(t')` for `j < k`, truncated at `trunc - j`.
    pub coeffs: Vec<MultiSeries>,
}

/// A quadratic unit `V_0`, nonvanishing on the closed unit polydisk, times `P_0 = t_d^k + Σ u_j(t') t_d^j` with quadratic
/// `u_j` vanishing at the origin. Requires `d >= 2` and `trunc >= k + 3`, so
/// that the product is exact at `trunc`.
pub fn random_factored_germ<R: Rng>(rng: &mut R, d: usize, k: usize, trunc: usize) -> Result<FactoredGerm, SeriesError> {
    if d < 2 || trunc < k + 3 {
        return Err(SeriesError::InvalidArgument(format!("need d >= 2 and N >= k + 3, got d = {d}, k = {k}, N = {trunc}")));
    }
    // non-constant part of V_0 bounded by |V_0(0)|/2 on the closed unit polydisk
    let lead = annulus(rng, 0.5, 1.5);
    let mut v_terms: Vec<_> = degree_at_most(d, 2)
        .into_iter()
        .skip(1)
        .map(|e| (e, unit_square(rng)))
        .collect();
    let total: f64 = v_terms.iter().map(|(_, c)| c.norm()).sum();
    for (_, c) in &mut v_terms {
        *c *= 0.5 * lead.norm() / total;
    }
    v_terms.push((vec![0; d], lead));
    let v0 = MultiSeries::from_terms(d, trunc, v_terms)?;

    let mut p_terms = vec![(unit_exponent(d, k), Complex64::new(1.0, 0.0))];
    let mut coeffs = Vec::with_capacity(k);
    for j in 0..k {
        let terms: Vec<_> = degree_at_most(d - 1, 2)
            .into_iter()
            .filter(|a| a.iter().any(|&x| x != 0))
            .map(|a| (a, unit_square(rng)))
            .collect();
        for (a, c) in &terms {
            let mut e = a.clone();
            e.push(j as u32);
            p_terms.push((e, *c));
        }
        coeffs.push(MultiSeries::from_terms(d - 1, trunc - j, terms)?);
    }
    let p0 = MultiSeries::from_terms(d, trunc, p_terms)?;
    Ok(FactoredGerm {
        u: v0.mul(&p0)?,
        v0: v0.with_trunc(trunc - k),
        coeffs,
    })
}

fn unit_exponent(d: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; d];
    e[d - 1] = k as u32;
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn germ_has_requested_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_germ(&mut rng, 3, 2, 6, 1.0).unwrap();
        let axis = u.axis_coeffs();
        assert_eq!(axis[0], Complex64::default());
        assert_eq!(axis[1], Complex64::default());
        assert!(axis[2].norm() >= 0.5);
        assert_eq!(crate::weierstrass::vanishing_order(&u).unwrap(), 2);
    }

    #[test]
    fn factored_germ_is_a_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_factored_germ(&mut rng, 2, 3, 8).unwrap();
        assert_eq!(g.coeffs.len(), 3);
        assert_eq!(g.v0.trunc(), 5);
        assert!(random_factored_germ(&mut rng, 1, 1, 8).is_err());
    }
}
