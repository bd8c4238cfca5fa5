//! The built-in transcendental function families.
//!
//! Each family supplies evaluation, the derivative, its singular-value
//! radius, the classification of preimage components of the disk complement,
//! a logarithmic coordinate `phi` mapping each tract conformally onto the
//! right half-plane, and the univalent inverse branch attached to a
//! fundamental domain.
//!
//! The normalization is fixed once for the whole crate: with `R` the cut
//! radius, `E(zeta) = R * exp(zeta)` is the universal covering of the disk
//! complement by the right half-plane, and `phi` is the lift of `f` through
//! `E` on each tract, so `E(phi(z)) = f(z)` holds identically. Branch indices
//! count the horizontal strips of height 2*pi cut out of the half-plane by
//! the preimages of the cut ray.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::partition::DomainId;

/// Absolute tolerance for pole detection in `eval`/`deriv`.
pub const POLE_TOL: f64 = 1e-12;
/// Relative round-trip tolerance an inverse branch must meet.
pub const ROUND_TRIP_RTOL: f64 = 1e-12;
/// Relative step tolerance of the damped Newton refinement.
pub const NEWTON_STEP_RTOL: f64 = 1e-13;
/// Iteration cap of the damped Newton refinement.
pub const NEWTON_MAX_ITER: u32 = 100;
/// Maximum number of step halvings per damped Newton iteration.
pub const NEWTON_MAX_HALVINGS: u32 = 8;
/// A branch whose asymptotic seed has scaled residual above this is
/// declared outside the supported window.
pub const SEED_RESIDUAL_LIMIT: f64 = 1e3;

/// A concrete member of one of the supported families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionSpec {
    /// `f(z) = lambda * exp(z)`, `lambda != 0`.
    ExpFamily { lambda: Complex64 },
    /// `f(z) = lambda * sin(z)`, `lambda != 0`.
    SinFamily { lambda: Complex64 },
    /// `f(z) = exp(z) / (z - pole)`.
    ExpOverLinear { pole: Complex64 },
}

/// Classification of one connected component of the preimage of the disk
/// complement. Family-specific analytic knowledge, recorded, not computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreimageComponentClass {
    /// Unbounded, simply connected; `f` restricted to it is a universal
    /// covering of the disk complement.
    Tract,
    /// Bounded component containing exactly one pole; `f` is a degree-`order`
    /// covering off the pole.
    PoleComponent { pole: Complex64, order: u32 },
}

impl FunctionSpec {
    pub fn exp_family(lambda: Complex64) -> Result<Self> {
        check_parameter("lambda", lambda, true)?;
        Ok(FunctionSpec::ExpFamily { lambda })
    }

    pub fn sin_family(lambda: Complex64) -> Result<Self> {
        check_parameter("lambda", lambda, true)?;
        Ok(FunctionSpec::SinFamily { lambda })
    }

    pub fn exp_over_linear(pole: Complex64) -> Result<Self> {
        check_parameter("pole", pole, false)?;
        Ok(FunctionSpec::ExpOverLinear { pole })
    }

    /// The finite pole of the family, if any.
    pub fn pole(&self) -> Option<Complex64> {
        match self {
            FunctionSpec::ExpOverLinear { pole } => Some(*pole),
            _ => None,
        }
    }

    /// Number of tracts over infinity.
    pub fn tract_count(&self) -> usize {
        match self {
            FunctionSpec::ExpFamily { .. } => 1,
            FunctionSpec::SinFamily { .. } => 2,
            FunctionSpec::ExpOverLinear { .. } => 1,
        }
    }
}

/// Evaluates `f(z)`.
pub fn eval(spec: &FunctionSpec, z: Complex64) -> Result<Complex64> {
    match spec {
        FunctionSpec::ExpFamily { lambda } => Ok(lambda * z.exp()),
        FunctionSpec::SinFamily { lambda } => Ok(lambda * z.sin()),
        FunctionSpec::ExpOverLinear { pole } => {
            let d = z - pole;
            if d.norm() <= POLE_TOL {
                return Err(Error::PoleHit { z, pole: *pole });
            }
            Ok(z.exp() / d)
        }
    }
}

/// Evaluates `f'(z)`.
pub fn deriv(spec: &FunctionSpec, z: Complex64) -> Result<Complex64> {
    match spec {
        FunctionSpec::ExpFamily { lambda } => Ok(lambda * z.exp()),
        FunctionSpec::SinFamily { lambda } => Ok(lambda * z.cos()),
        FunctionSpec::ExpOverLinear { pole } => {
            let d = z - pole;
            if d.norm() <= POLE_TOL {
                return Err(Error::PoleHit { z, pole: *pole });
            }
            Ok(z.exp() * (d - 1.0) / (d * d))
        }
    }
}

/// Smallest radius `R0` with all singular values in `{|w| <= R0}`.
///
/// The exponential family returns 0; the partition applies its configured
/// floor so the disk complement is a true annulus neighborhood of infinity.
pub fn singular_radius(spec: &FunctionSpec) -> f64 {
    match spec {
        FunctionSpec::ExpFamily { .. } => 0.0,
        FunctionSpec::SinFamily { lambda } => lambda.norm(),
        FunctionSpec::ExpOverLinear { pole } => (pole.re + 1.0).exp(),
    }
}

/// Classifies the connected components of the preimage of `{|w| > r}`.
pub fn classify_preimage_components(
    spec: &FunctionSpec,
    r: f64,
) -> Result<Vec<PreimageComponentClass>> {
    let min = singular_radius(spec);
    if r <= min {
        return Err(Error::RadiusTooSmall { radius: r, min });
    }
    Ok(match spec {
        FunctionSpec::ExpFamily { .. } => vec![PreimageComponentClass::Tract],
        FunctionSpec::SinFamily { .. } => {
            vec![PreimageComponentClass::Tract, PreimageComponentClass::Tract]
        }
        FunctionSpec::ExpOverLinear { pole } => vec![
            PreimageComponentClass::Tract,
            PreimageComponentClass::PoleComponent { pole: *pole, order: 1 },
        ],
    })
}

/// Tract membership with a closure margin. `margin = 0` tests the open
/// tract; a small positive margin tests the closure conservatively.
///
/// Overflow-safe: works through `log|f| - log r` rather than `|f|`.
pub fn in_tract(spec: &FunctionSpec, r: f64, tract: usize, z: Complex64, margin: f64) -> bool {
    match spec {
        FunctionSpec::ExpFamily { lambda } => {
            tract == 0 && z.re > (r / lambda.norm()).ln() - margin
        }
        FunctionSpec::SinFamily { .. } => {
            let upper = tract == 0;
            if (upper && z.im <= -margin) || (!upper && z.im >= margin) {
                return false;
            }
            // Re phi is finite even where sin overflows.
            sin_re_phi(spec, r, upper, z) > -margin
        }
        FunctionSpec::ExpOverLinear { pole } => {
            let d = z - pole;
            // The pole component sits inside the unit disk around the pole.
            tract == 0 && d.norm() > 1.0 && z.re - r.ln() - d.norm().ln() > -margin
        }
    }
}

/// Tract anchor used to normalize the logarithmic coordinate.
pub fn base_point(spec: &FunctionSpec, r: f64, tract: usize) -> Complex64 {
    match spec {
        FunctionSpec::ExpFamily { lambda } => Complex64::new((r / lambda.norm()).ln() + 1.0, 0.0),
        FunctionSpec::SinFamily { lambda } => {
            let y = sin_tract_y_min(r, lambda.norm()) + 1.0;
            Complex64::new(0.0, if tract == 0 { y } else { -y })
        }
        FunctionSpec::ExpOverLinear { pole } => {
            // Solve x = 1 + ln r + ln(|x - p| + 1); log damping converges fast.
            let mut x = 1.0 + r.ln() + (2.0 + pole.norm()).ln();
            for _ in 0..40 {
                x = 1.0 + r.ln() + ((Complex64::new(x, 0.0) - pole).norm() + 1.0).ln();
            }
            Complex64::new(x, 0.0)
        }
    }
}

/// The logarithmic coordinate on the indexed tract: a conformal isomorphism
/// onto the right half-plane with `r * exp(phi(z)) = f(z)`.
///
/// For the exponential family this is `z + log(lambda / r)` with the
/// principal logarithm. The other families use the explicit analytic lift
/// normalized at the tract's base point; [`phi_continued`] evaluates the
/// same function by numerical continuation and is kept as a cross-check.
pub fn phi(spec: &FunctionSpec, r: f64, tract: usize, z: Complex64) -> Result<Complex64> {
    check_tract_index(spec, tract)?;
    let value = match spec {
        FunctionSpec::ExpFamily { lambda } => z + (lambda / r).ln(),
        FunctionSpec::SinFamily { lambda } => {
            let upper = tract == 0;
            if (upper && z.im <= 0.0) || (!upper && z.im >= 0.0) {
                return Err(Error::OutsideTract { re_phi: f64::NEG_INFINITY });
            }
            sin_phi(*lambda, r, upper, z)
        }
        FunctionSpec::ExpOverLinear { pole } => {
            let d = z - pole;
            if d.norm() <= POLE_TOL {
                return Err(Error::PoleHit { z, pole: *pole });
            }
            z - Complex64::new(r.ln(), 0.0) - d.ln()
        }
    };
    if value.re <= 0.0 {
        return Err(Error::OutsideTract { re_phi: value.re });
    }
    Ok(value)
}

/// Evaluates `phi` by continuation of `log(f/r)` along the straight segment
/// from the tract's base point. Steps are kept short enough that the true
/// winding per step stays below a quarter turn, estimated from `|f'/f|` at
/// the endpoints. Reference implementation for tests and diagnostics.
pub fn phi_continued(spec: &FunctionSpec, r: f64, tract: usize, z: Complex64) -> Result<Complex64> {
    check_tract_index(spec, tract)?;
    let start = base_point(spec, r, tract);
    let mut phi_acc = phi(spec, r, tract, start)?;
    let mut prev = start;
    let mut f_prev = eval(spec, prev)?;
    let log_rate = |p: Complex64| -> Result<f64> { Ok((deriv(spec, p)? / eval(spec, p)?).norm()) };
    let mut rate_prev = log_rate(prev)?;
    // Uniform pre-split, then adaptive bisection on demand.
    let n0 = ((z - start).norm() / 0.1).ceil().max(1.0) as usize;
    let mut pending: Vec<Complex64> =
        (1..=n0).rev().map(|j| start + (z - start) * (j as f64 / n0 as f64)).collect();
    let mut splits = 0u32;
    while let Some(target) = pending.pop() {
        let f_next = eval(spec, target)?;
        let rate_next = log_rate(target)?;
        let ratio = f_next / f_prev;
        let winding_bound = (target - prev).norm() * rate_prev.max(rate_next);
        let good = winding_bound < PI / 4.0
            && ratio.norm() > 0.75
            && ratio.norm() < 4.0 / 3.0
            && ratio.arg().abs() < PI / 4.0;
        if good {
            phi_acc += ratio.ln();
            prev = target;
            f_prev = f_next;
            rate_prev = rate_next;
        } else {
            splits += 1;
            if splits > 200_000 {
                return Err(Error::NoConvergence { iterations: splits });
            }
            let mid = 0.5 * (prev + target);
            pending.push(target);
            pending.push(mid);
        }
    }
    if phi_acc.re <= 0.0 {
        return Err(Error::OutsideTract { re_phi: phi_acc.re });
    }
    Ok(phi_acc)
}

/// The univalent inverse branch attached to fundamental domain `id`:
/// returns `z` with `f(z) = w` lying in that domain.
pub fn inverse_branch(
    spec: &FunctionSpec,
    r: f64,
    delta_angle: f64,
    id: DomainId,
    w: Complex64,
) -> Result<Complex64> {
    check_tract_index(spec, id.tract)?;
    if !in_omega_minus_delta(r, delta_angle, w) {
        return Err(Error::OffDomain { w });
    }
    let (lo, hi) = strip_bounds(delta_angle, id.branch);
    // Target point in the half-plane: the canonical logarithm of w/r whose
    // imaginary part falls in the branch strip.
    let zeta = Complex64::new((w.norm() / r).ln(), arg_in_interval(w.arg(), lo, hi));

    match spec {
        FunctionSpec::ExpFamily { lambda } => {
            // z = phi^{-1}(zeta) = zeta - log(lambda/r); exact.
            Ok(zeta - (lambda / r).ln())
        }
        FunctionSpec::SinFamily { lambda } => {
            sin_inverse_branch(*lambda, r, id, zeta, w)
        }
        FunctionSpec::ExpOverLinear { pole } => {
            eol_inverse_branch(*pole, r, id, zeta, w)
        }
    }
}

/// True iff `w` lies in the cut disk complement: `|w| > r` and not within
/// relative tolerance of the cut ray.
pub fn in_omega_minus_delta(r: f64, delta_angle: f64, w: Complex64) -> bool {
    let n = w.norm();
    if n.is_nan() || n <= r {
        return false;
    }
    dist_to_delta(r, delta_angle, w) > 1e-12 * n.max(1.0)
}

/// Euclidean distance from `w` to the cut ray `{t e^{i angle}: t >= r}`.
pub fn dist_to_delta(r: f64, delta_angle: f64, w: Complex64) -> f64 {
    let q = w * Complex64::from_polar(1.0, -delta_angle);
    if q.re >= r {
        q.im.abs()
    } else {
        (q - r).norm()
    }
}

/// Branch strip `(angle + 2 pi (k-1), angle + 2 pi k)` in the half-plane.
pub fn strip_bounds(delta_angle: f64, branch: i32) -> (f64, f64) {
    let lo = delta_angle + TAU * (f64::from(branch) - 1.0);
    (lo, lo + TAU)
}

/// Representative of `angle` modulo 2 pi in the open interval `(lo, hi)`,
/// `hi - lo = 2 pi`. The caller guarantees `angle` is not congruent to `lo`.
pub fn arg_in_interval(angle: f64, lo: f64, hi: f64) -> f64 {
    let center = 0.5 * (lo + hi);
    let mut a = angle + TAU * ((center - angle) / TAU).round();
    if a <= lo {
        a += TAU;
    } else if a >= hi {
        a -= TAU;
    }
    a
}

fn check_parameter(name: &str, value: Complex64, nonzero: bool) -> Result<()> {
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} must be finite")));
    }
    if nonzero && value == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument(format!("{name} must be nonzero")));
    }
    Ok(())
}

fn check_tract_index(spec: &FunctionSpec, tract: usize) -> Result<()> {
    let count = spec.tract_count();
    if tract >= count {
        return Err(Error::BadTractIndex { index: tract, count });
    }
    Ok(())
}

// --- sine family internals ---------------------------------------------------

/// Height of the lowest tract point: the upper tract is contained in
/// `{Im z >= asinh(sqrt(rho^2 - 1))}` with `rho = r / |lambda|`.
pub(crate) fn sin_tract_y_min(r: f64, lambda_abs: f64) -> f64 {
    let rho = r / lambda_abs;
    (rho * rho - 1.0).max(0.0).sqrt().asinh()
}

/// Analytic lift on the sine tracts. On the upper tract
/// `f = (i lambda / 2) e^{-iz} (1 - e^{2iz})`, so
/// `phi = -iz + Log(i lambda / 2r) + Log(1 - e^{2iz})`; the last factor stays
/// in the unit disk around 1, making the principal logarithm analytic on the
/// whole upper half-plane. The lower tract is the mirror image.
fn sin_phi(lambda: Complex64, r: f64, upper: bool, z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if upper {
        let q = (2.0 * i * z).exp();
        -i * z + (i * lambda / (2.0 * r)).ln() + (1.0 - q).ln()
    } else {
        let q = (-2.0 * i * z).exp();
        i * z + (-i * lambda / (2.0 * r)).ln() + (1.0 - q).ln()
    }
}

/// `Re phi` on a sine tract, computed without evaluating `sin` (stable for
/// large `|Im z|`).
fn sin_re_phi(spec: &FunctionSpec, r: f64, upper: bool, z: Complex64) -> f64 {
    let lambda = match spec {
        FunctionSpec::SinFamily { lambda } => *lambda,
        _ => unreachable!("sine helper on non-sine family"),
    };
    let y = if upper { z.im } else { -z.im };
    let q_abs = (-2.0 * y).exp();
    // |1 - q| with |q| = e^{-2y}; fine for all y > 0.
    let q = if upper {
        (2.0 * Complex64::i() * z).exp()
    } else {
        (-2.0 * Complex64::i() * z).exp()
    };
    let tail = if q_abs < 1e-300 { 0.0 } else { (Complex64::new(1.0, 0.0) - q).norm().ln() };
    y + (lambda.norm() / (2.0 * r)).ln() + tail
}

fn sin_inverse_branch(
    lambda: Complex64,
    r: f64,
    id: DomainId,
    zeta: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    let upper = id.tract == 0;
    let i = Complex64::i();
    // Solutions of lambda sin z = w correspond to roots u = e^{-iz} of
    // lambda u^2 + 2iw u - lambda = 0; the root product is -1, so one root is
    // outside the unit circle (upper tract) and one inside (lower tract).
    let s = (lambda * lambda - w * w).sqrt();
    let q = -i * w;
    let big = if (q + s).norm() >= (q - s).norm() { (q + s) / lambda } else { (q - s) / lambda };
    let u = if upper { big } else { -1.0 / big };
    let z0 = i * u.ln();

    // Align the 2 pi translation so phi lands in the requested strip.
    let phi0 = sin_phi(lambda, r, upper, z0);
    let shift = if upper {
        (phi0.im - zeta.im) / TAU
    } else {
        (zeta.im - phi0.im) / TAU
    };
    let mut z = z0 + TAU * shift.round();

    // Polish the closed form to full precision.
    for _ in 0..4 {
        let g = lambda * z.sin() - w;
        if g.norm() <= 1e-16 * w.norm().max(1.0) {
            break;
        }
        let gp = lambda * z.cos();
        if gp.norm() < 1e-300 {
            break;
        }
        z -= g / gp;
    }

    let phi_z = sin_phi(lambda, r, upper, z);
    if (phi_z - zeta).norm() > 1e-8 {
        return Err(Error::BranchEscape { tract: id.tract, branch: id.branch });
    }
    let residual = (lambda * z.sin() - w).norm();
    if residual > ROUND_TRIP_RTOL * w.norm().max(1.0) {
        return Err(Error::NoConvergence { iterations: 4 });
    }
    Ok(z)
}

// --- exp-over-linear internals -----------------------------------------------

fn eol_inverse_branch(
    pole: Complex64,
    r: f64,
    id: DomainId,
    zeta: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    // Two-term asymptotic seed for e^z = w (z - p):
    // z ~ L + log(L - p) with L the strip-aligned logarithm of w.
    let l = zeta + Complex64::new(r.ln(), 0.0);
    let lp = l - pole;
    if lp.norm() <= POLE_TOL {
        return Err(Error::BranchWindowExceeded { branch: id.branch, residual: f64::INFINITY });
    }
    let seed = l + lp.ln();
    let scale = w.norm().max(1.0);
    let seed_residual = (seed.exp() - w * (seed - pole)).norm() / scale;
    if seed_residual > SEED_RESIDUAL_LIMIT {
        return Err(Error::BranchWindowExceeded { branch: id.branch, residual: seed_residual });
    }

    // Damped Newton on g(z) = e^z - w (z - p).
    let g = |z: Complex64| z.exp() - w * (z - pole);
    let mut z = seed;
    let mut gz = g(z);
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let gp = z.exp() - w;
        if gp.norm() < 1e-300 {
            return Err(Error::DerivativeSingular { modulus: gp.norm() });
        }
        let mut step = gz / gp;
        let mut z_next = z - step;
        let mut g_next = g(z_next);
        let mut halvings = 0;
        while g_next.norm() > gz.norm() && halvings < NEWTON_MAX_HALVINGS {
            step *= 0.5;
            z_next = z - step;
            g_next = g(z_next);
            halvings += 1;
        }
        let done = step.norm() <= NEWTON_STEP_RTOL * z_next.norm().max(1.0);
        z = z_next;
        gz = g_next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: NEWTON_MAX_ITER });
    }

    let d = z - pole;
    if d.norm() <= POLE_TOL {
        return Err(Error::PoleHit { z, pole });
    }
    let residual = (z.exp() / d - w).norm();
    if residual > ROUND_TRIP_RTOL * w.norm().max(1.0) {
        return Err(Error::ResidualExceeded {
            residual,
            bound: ROUND_TRIP_RTOL * w.norm().max(1.0),
        });
    }
    // Verify the root landed in the requested strip.
    let phi_z = z - Complex64::new(r.ln(), 0.0) - d.ln();
    if (phi_z.im - zeta.im).abs() > 1e-6 || phi_z.re <= 0.0 {
        return Err(Error::BranchEscape { tract: id.tract, branch: id.branch });
    }
    Ok(z)
}
