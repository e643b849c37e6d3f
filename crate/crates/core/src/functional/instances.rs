//! Random inputs: perturbations in `𝓗_0` and `P = Q ∘ y` instances whose
//! root-containment status is known by construction.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::series::{circle_norm, DiskSpec, Poly, SeriesError, UniSeries};

fn unit_disk_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

fn annulus_point<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..TAU))
}

/// `f = Σ_{n=1}^{trunc} a_n z^n` with geometric decay on `|z| = r`,
/// rescaled so that the sampled norm `‖f‖_r` equals `norm`.
pub fn random_h0<R: Rng>(rng: &mut R, trunc: usize, r: f64, samples: usize, norm: f64) -> UniSeries {
    let mut coeffs = vec![Complex64::default(); trunc + 1];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        *c = w * (0.8f64 / r).powi(n as i32);
    }
    let f = UniSeries::new(coeffs);
    let scale = circle_norm(&f, r, samples);
    f.scale(Complex64::new(norm / scale, 0.0))
}

/// `n + sqrt((z - m)^2 + c)` on the branch through `sqrt(m^2 + c)` at `z = 0`.
pub fn sqrt_transfer(m: Complex64, n: Complex64, c: Complex64, trunc: usize) -> Result<UniSeries, SeriesError> {
    let inside = UniSeries::new(vec![m * m + c, -2.0 * m, Complex64::new(1.0, 0.0)]).with_trunc(trunc);
    let root = UniSeries::from_multi(&inside.to_multi().nth_root(2, 0)?)?;
    Ok(&root + &UniSeries::constant(trunc, n))
}

/// `outer ∘ inner` for polynomials.
pub fn poly_compose(outer: &Poly, inner: &Poly) -> Poly {
    let mut acc = Poly::trimmed(vec![outer.leading()]).expect("nonzero leading");
    for &a in outer.coeffs().iter().rev().skip(1) {
        let mut c = acc.mul(inner).coeffs().to_vec();
        c[0] += a;
        acc = Poly::trimmed(c).expect("nonzero leading");
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `y = a z + b`, `Q` with roots `y(ζ_i)`; containment holds.
    Affine,
    /// `y` even about `m` with two distinct roots of `P` sharing an image.
    Collision,
    /// Double root of `P` at a critical point of `y`.
    Critical,
    /// Degree 4 built as `S ∘ P_2 = S ∘ Q_2 ∘ y` over a collision instance.
    Composite,
}

pub const FAMILIES: [Family; 4] = [Family::Affine, Family::Collision, Family::Critical, Family::Composite];

#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentInstance {
    pub family: Family,
    pub p: Poly,
    pub q: Poly,
    pub y: UniSeries,
    pub disk: DiskSpec,
    /// Whether `Q^{-1}{0} ⊂ y(D)` by construction.
    pub contained: bool,
}

const SQRT_TRUNC: usize = 60;

pub fn random_instance<R: Rng>(rng: &mut R, family: Family) -> Result<ContainmentInstance, SeriesError> {
    let one = Complex64::new(1.0, 0.0);
    match family {
        Family::Affine => {
            let disk = DiskSpec::new(1.0, 0.75, 1024)?;
            let k = rng.gen_range(1..=4);
            let a = annulus_point(rng, 0.5, 2.0);
            let b = unit_disk_point(rng, 0.3);
            let lead = annulus_point(rng, 0.5, 2.0);
            let mut zs: Vec<Complex64> = (0..k).map(|_| unit_disk_point(rng, 0.6)).collect();
            if k >= 2 && rng.gen_bool(0.3) {
                zs[1] = zs[0];
            }
            let images: Vec<Complex64> = zs.iter().map(|&z| a * z + b).collect();
            Ok(ContainmentInstance {
                family,
                p: Poly::from_roots(&zs, lead * a.powu(k as u32)),
                q: Poly::from_roots(&images, lead),
                y: UniSeries::new(vec![b, a]).with_trunc(8),
                disk,
                contained: true,
            })
        }
        Family::Collision | Family::Critical | Family::Composite => {
            let disk = DiskSpec::new(0.5, 0.375, 1024)?;
            let m = unit_disk_point(rng, 0.1);
            let n = unit_disk_point(rng, 0.3);
            let c = Complex64::from_polar(rng.gen_range(1.0..2.0), rng.gen_range(-FRAC_PI_2..FRAC_PI_2));
            let h = if family == Family::Critical {
                Complex64::default()
            } else {
                annulus_point(rng, 0.05, 0.25)
            };
            let y = sqrt_transfer(m, n, c, SQRT_TRUNC)?;
            // (z - m)^2 - h^2 and (w - n)^2 - (c + h^2)
            let p2 = Poly::new(vec![m * m - h * h, -2.0 * m, one])?;
            let q2 = Poly::new(vec![n * n - c - h * h, -2.0 * n, one])?;
            let (p, q) = if family == Family::Composite {
                let s1 = unit_disk_point(rng, 0.02);
                let s2 = unit_disk_point(rng, 0.02);
                let s = Poly::from_roots(&[s1, s2], one);
                (poly_compose(&s, &p2), poly_compose(&s, &q2))
            } else {
                (p2, q2)
            };
            Ok(ContainmentInstance { family, p, q, y, disk, contained: false })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perturbation_has_requested_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_h0(&mut rng, 12, 0.75, 1024, 0.3);
        assert_eq!(f.coeff(0), Complex64::default());
        assert!((circle_norm(&f, 0.75, 1024) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn sqrt_transfer_squares_back() {
        let (m, n, c) = (Complex64::new(0.05, 0.02), Complex64::new(0.1, 0.0), Complex64::new(1.2, 0.4));
        let y = sqrt_transfer(m, n, c, 30).unwrap();
        let s = &y - &UniSeries::constant(30, n);
        let want = UniSeries::new(vec![m * m + c, -2.0 * m, Complex64::new(1.0, 0.0)]).with_trunc(30);
        assert!(s.mul_trunc(&s, 30).max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn composition_of_quadratics() {
        let s = Poly::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let inner = Poly::from_real(&[1.0, 1.0]).unwrap();
        // (z + 1)^2 - 1 = z^2 + 2z
        assert_eq!(poly_compose(&s, &inner), Poly::from_real(&[0.0, 2.0, 1.0]).unwrap());
    }

    #[test]
    fn premises_hold_by_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for family in FAMILIES {
            for _ in 0..5 {
                let inst = random_instance(&mut rng, family).unwrap();
                let gap = inst.q.compose_series(&inst.y).max_abs_diff(&inst.p.to_series(inst.y.trunc()));
                assert!(gap < 1e-12, "{family:?}: {gap}");
            }
        }
    }
}
