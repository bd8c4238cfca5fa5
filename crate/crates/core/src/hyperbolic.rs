//! Hyperbolic-metric estimates on the right half-plane.
//!
//! Everything downstream only ever compares *ratios* of hyperbolic
//! quantities, so the absolute curvature normalization is immaterial there;
//! the individual operations use the conventions documented on each one.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A certified contraction factor together with the region where it is
/// guaranteed: the bound holds wherever `Re phi(z) >= validity_threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaEstimate {
    pub bound: f64,
    pub validity_threshold: f64,
}

/// Hyperbolic density of the right half-plane, `1 / (2 Re z)`.
pub fn density_halfplane(z: Complex64) -> Result<f64> {
    if z.re <= 0.0 {
        return Err(Error::OutsideHalfPlane { re: z.re });
    }
    Ok(1.0 / (2.0 * z.re))
}

/// Hyperbolic distance between two points of the right half-plane,
/// `arccosh(1 + |z - w|^2 / (2 Re z Re w))`, evaluated in the cancellation-
/// free form `2 asinh(|z - w| / (2 sqrt(Re z Re w)))`.
pub fn distance_halfplane(z: Complex64, w: Complex64) -> Result<f64> {
    if z.re <= 0.0 {
        return Err(Error::OutsideHalfPlane { re: z.re });
    }
    if w.re <= 0.0 {
        return Err(Error::OutsideHalfPlane { re: w.re });
    }
    let t = (z - w).norm() / (2.0 * (z.re * w.re).sqrt());
    Ok(2.0 * t.asinh())
}

/// Lower bound for the density of any simply connected domain at a point at
/// the given Euclidean distance from its boundary: `1 / (2 d)`.
pub fn density_lower_bound(dist_to_boundary: f64) -> f64 {
    assert!(dist_to_boundary > 0.0, "boundary distance must be positive");
    1.0 / (2.0 * dist_to_boundary)
}

/// Upper bound for the tract-to-domain density ratio at a point with the
/// given `Re phi`: `pi / Re phi`. Values >= 1 certify nothing.
pub fn contraction_ratio_bound(re_phi: f64) -> f64 {
    assert!(re_phi > 0.0, "Re phi must be positive");
    PI / re_phi
}

/// The region where a prescribed contraction factor is certified:
/// `Re phi >= pi / kappa`.
pub fn kappa_for_threshold(target_kappa: f64) -> KappaEstimate {
    assert!(
        target_kappa > 0.0 && target_kappa < 1.0,
        "kappa must lie in (0, 1)"
    );
    KappaEstimate { bound: target_kappa, validity_threshold: PI / target_kappa }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_formula_values() {
        assert!((density_halfplane(c(1.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((density_halfplane(c(3.0, 1.0)).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((density_halfplane(c(0.5, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            density_halfplane(c(0.0, 1.0)),
            Err(Error::OutsideHalfPlane { .. })
        ));
    }

    #[test]
    fn density_lower_bound_values() {
        assert!((density_lower_bound(PI) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((density_lower_bound(1.0) - 0.5).abs() < 1e-15);
        assert!((density_lower_bound(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn contraction_ratio_values_and_monotonicity() {
        assert!((contraction_ratio_bound(10.0 * PI) - 0.1).abs() < 1e-15);
        assert!((contraction_ratio_bound(PI) - 1.0).abs() < 1e-15);
        assert!((contraction_ratio_bound(2.0 * PI) - 0.5).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let b = contraction_ratio_bound(0.1 * i as f64);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn kappa_thresholds() {
        let k = kappa_for_threshold(0.5);
        assert!((k.validity_threshold - 2.0 * PI).abs() < 1e-15);
        let k = kappa_for_threshold(0.1);
        assert!((k.validity_threshold - 10.0 * PI).abs() < 1e-15);
        let k = kappa_for_threshold(0.99);
        assert!((k.validity_threshold - PI / 0.99).abs() < 1e-12);
        assert!(k.validity_threshold >= PI / k.bound);
    }

    #[test]
    fn distance_identity_and_known_value() {
        assert_eq!(distance_halfplane(c(1.0, 0.0), c(1.0, 0.0)).unwrap(), 0.0);
        // The positive real axis is a geodesic: d(1, 3) = ln 3.
        let d = distance_halfplane(c(1.0, 0.0), c(3.0, 0.0)).unwrap();
        assert!((d - 3.0f64.ln()).abs() < 1e-14);
    }

    /// Independent oracle: construct the geodesic through two points by
    /// elementary geometry (a circle centered on the boundary axis, or a
    /// horizontal line), then integrate the density 1/Re along it with
    /// composite Simpson quadrature.
    fn oracle_distance(z: Complex64, w: Complex64) -> f64 {
        let n = 40_000;
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| -> f64 {
            let h = (b - a) / n as f64;
            let mut s = f(a) + f(b);
            for i in 1..n {
                let x = a + i as f64 * h;
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
            }
            s * h / 3.0
        };
        if (z.im - w.im).abs() < 1e-14 {
            // Horizontal geodesic, perpendicular to the boundary.
            let (a, b) = (z.re.min(w.re), z.re.max(w.re));
            return simpson(&|x| 1.0 / x, a, b);
        }
        // Center (0, c) equidistant from both points.
        let c0 = (z.norm_sqr() - w.norm_sqr()) / (2.0 * (z.im - w.im));
        let center = Complex64::new(0.0, c0);
        let radius = (z - center).norm();
        let a0 = (z - center).arg();
        let a1 = (w - center).arg();
        let f = |t: f64| {
            let p = center + Complex64::from_polar(radius, t);
            radius / p.re
        };
        simpson(&f, a0.min(a1), a0.max(a1))
    }

    #[test]
    fn distance_matches_geodesic_quadrature() {
        let pairs = [
            (c(1.0, 0.0), c(3.0, 0.0)),
            (c(1.0, 0.0), c(1.0, 1.0)),
            (c(0.5, -2.0), c(4.0, 3.0)),
            (c(2.0, 5.0), c(2.0, -1.0)),
        ];
        for (z, w) in pairs {
            let closed = distance_halfplane(z, w).unwrap();
            let oracle = oracle_distance(z, w);
            assert!(
                (closed - oracle).abs() < 1e-8,
                "distance mismatch at ({z}, {w}): closed {closed}, oracle {oracle}"
            );
        }
        // Spec anchor: d(1, 1+i) = arccosh(3/2).
        let d = distance_halfplane(c(1.0, 0.0), c(1.0, 1.0)).unwrap();
        assert!((d - 0.9624236501192069).abs() < 1e-14);
    }

    #[test]
    fn distance_metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = c(rng.gen_range(0.05..10.0), rng.gen_range(-10.0..10.0));
            let q = c(rng.gen_range(0.05..10.0), rng.gen_range(-10.0..10.0));
            let s = c(rng.gen_range(0.05..10.0), rng.gen_range(-10.0..10.0));
            let dpq = distance_halfplane(p, q).unwrap();
            let dqp = distance_halfplane(q, p).unwrap();
            assert!((dpq - dqp).abs() < 1e-12);
            assert!(dpq >= 0.0);
            if p != q {
                assert!(dpq > 0.0);
            }
            let dps = distance_halfplane(p, s).unwrap();
            let dsq = distance_halfplane(s, q).unwrap();
            assert!(dpq <= dps + dsq + 1e-10);
        }
    }

    #[test]
    fn distance_invariant_under_halfplane_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let p = c(rng.gen_range(0.05..10.0), rng.gen_range(-10.0..10.0));
            let q = c(rng.gen_range(0.05..10.0), rng.gen_range(-10.0..10.0));
            let d = distance_halfplane(p, q).unwrap();
            let t = rng.gen_range(-20.0..20.0);
            let shift = c(0.0, t);
            let d_shift = distance_halfplane(p + shift, q + shift).unwrap();
            assert!((d - d_shift).abs() < 1e-10);
            let s = rng.gen_range(0.1..10.0);
            let d_scale = distance_halfplane(p * s, q * s).unwrap();
            assert!((d - d_scale).abs() < 1e-10);
        }
    }
}
