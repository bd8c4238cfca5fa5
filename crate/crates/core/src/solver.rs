//! Composition of inverse branches and the fixed-point iteration.
//!
//! An itinerary `s = F_1 ... F_n` of fundamental domains, each avoiding the
//! singular disk, selects the composition `psi_s = psi_{F_1} o ... o
//! psi_{F_n}`. That map strictly contracts the hyperbolic metric of `F_1`,
//! so iterating it from any admissible seed converges to the unique point of
//! `F_1` periodic under `f` with that exact itinerary, and the limit repels
//! under the forward map. The solver runs the iteration, reconstructs the
//! orbit by forward evaluation, and certifies the repelling property.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::function_model::{self, FunctionSpec};
use crate::partition::{DomainId, PartitionSpec};

/// Slack used when re-checking that orbit points sit in their prescribed
/// domains; a converged point extremely close to a domain boundary is an
/// error, not a silent acceptance.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Multiplied into `tol * max(1, |w|)` to bound the acceptable residual.
pub const RESIDUAL_FACTOR: f64 = 10.0;
/// Iteration cap of the cross-checking Newton refinement.
const REFINE_MAX_ITER: u32 = 100;

/// A finite word of fundamental domains; the period equals its length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Itinerary(Vec<DomainId>);

impl Itinerary {
    pub fn new(domains: Vec<DomainId>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::InvalidArgument("itinerary must be nonempty".into()));
        }
        Ok(Itinerary(domains))
    }

    pub fn domains(&self) -> &[DomainId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The left cyclic shift `F_2 ... F_n F_1`.
    pub fn cyclic_shift(&self) -> Itinerary {
        let mut d = self.0.clone();
        d.rotate_left(1);
        Itinerary(d)
    }

    /// Checks every entry against the disk-avoidance certificate.
    pub fn validate(&self, part: &PartitionSpec) -> Result<()> {
        for id in &self.0 {
            if !part.domain_avoids_disk(*id) {
                return Err(Error::DomainNotCertified { tract: id.tract, branch: id.branch });
            }
        }
        Ok(())
    }
}

/// True iff `s` is some shorter itinerary repeated two or more times.
pub fn is_proper_power(s: &Itinerary) -> bool {
    let n = s.len();
    for d in 1..n {
        if n % d != 0 {
            continue;
        }
        if (d..n).all(|i| s.0[i] == s.0[i % d]) {
            return true;
        }
    }
    false
}

/// A converged repelling periodic point with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPointResult {
    pub itinerary: Itinerary,
    /// The periodic point `w_s` in the first domain of the itinerary.
    pub point: Complex64,
    /// `w, f(w), ..., f^{n-1}(w)`; entry `i` lies in domain `i`.
    pub orbit: Vec<Complex64>,
    /// `(f^n)'(w)`, the chain-rule product over the orbit.
    pub multiplier: Complex64,
    pub multiplier_modulus: f64,
    /// `|f^n(w) - w|`.
    pub residual: f64,
    pub iterations: u32,
    /// Consecutive Euclidean step ratios of the fixed-point iteration.
    pub step_ratios: Vec<f64>,
}

/// Applies the inverse branches of `s` right to left; the result lies in the
/// first domain of `s`.
pub fn psi_s(
    spec: &FunctionSpec,
    part: &PartitionSpec,
    s: &Itinerary,
    w: Complex64,
) -> Result<Complex64> {
    if !part.in_omega_minus_delta(w) {
        return Err(Error::OffDomain { w });
    }
    let mut z = w;
    for (pos, id) in s.domains().iter().enumerate().rev() {
        if pos != s.len() - 1 && !part.in_omega_minus_delta(z) {
            // Cannot happen when every domain avoids the disk; signals a
            // partition bug or a tolerance breach.
            return Err(Error::IntermediateOffDomain { z });
        }
        z = part.inverse_branch(spec, *id, z)?;
    }
    Ok(z)
}

/// Iterates `psi_s` to its fixed point and certifies the result.
pub fn solve_periodic(
    spec: &FunctionSpec,
    part: &PartitionSpec,
    s: &Itinerary,
    tol: f64,
    max_iter: u32,
) -> Result<PeriodicPointResult> {
    solve_periodic_traced(spec, part, s, tol, max_iter).map(|(result, _)| result)
}

/// As [`solve_periodic`], additionally returning every iterate of `psi_s`
/// (all of which lie in the first domain) for contraction diagnostics.
pub fn solve_periodic_traced(
    spec: &FunctionSpec,
    part: &PartitionSpec,
    s: &Itinerary,
    tol: f64,
    max_iter: u32,
) -> Result<(PeriodicPointResult, Vec<Complex64>)> {
    if tol.is_nan() || tol < 1e-14 {
        return Err(Error::InvalidArgument("tol must be >= 1e-14".into()));
    }
    if max_iter < 1 {
        return Err(Error::InvalidArgument("max_iter must be >= 1".into()));
    }
    s.validate(part)?;

    // Seed diametrically opposite the cut; always in the cut disk complement.
    let seed = Complex64::from_polar(2.0 * part.radius, part.delta_angle + PI);
    let mut z = psi_s(spec, part, s, seed)?;
    let mut trace = vec![z];
    let mut steps: Vec<f64> = Vec::new();
    let mut converged = None;
    for m in 1..=max_iter {
        let next = psi_s(spec, part, s, z)?;
        let step = (next - z).norm();
        steps.push(step);
        trace.push(next);
        z = next;
        if step <= tol {
            converged = Some(m);
            break;
        }
    }
    let Some(iterations) = converged else {
        return Err(Error::NoConvergence { iterations: max_iter });
    };

    // Forward reconstruction independently validates the inverse branches.
    let n = s.len();
    let mut orbit = Vec::with_capacity(n);
    orbit.push(z);
    for i in 1..n {
        orbit.push(function_model::eval(spec, orbit[i - 1])?);
    }
    let closing = function_model::eval(spec, orbit[n - 1])?;
    let residual = (closing - z).norm();
    let bound = RESIDUAL_FACTOR * tol * z.norm().max(1.0);
    if residual > bound {
        return Err(Error::ResidualExceeded { residual, bound });
    }
    for (i, (point, id)) in orbit.iter().zip(s.domains()).enumerate() {
        if !part.in_domain(spec, *id, *point, MEMBERSHIP_TOL) {
            return Err(Error::ItineraryViolation { index: i });
        }
    }

    let multiplier = multiplier(spec, &orbit)?;
    let multiplier_modulus = multiplier.norm();
    if multiplier_modulus <= 1.0 {
        return Err(Error::NotRepelling { modulus: multiplier_modulus });
    }

    let step_ratios = steps.windows(2).map(|w| w[1] / w[0]).collect();
    let result = PeriodicPointResult {
        itinerary: s.clone(),
        point: z,
        orbit,
        multiplier,
        multiplier_modulus,
        residual,
        iterations,
        step_ratios,
    };
    Ok((result, trace))
}

/// Chain-rule product of `f'` over the orbit.
pub fn multiplier(spec: &FunctionSpec, orbit: &[Complex64]) -> Result<Complex64> {
    if orbit.is_empty() {
        return Err(Error::InvalidArgument("orbit must be nonempty".into()));
    }
    let mut product = Complex64::new(1.0, 0.0);
    for z in orbit {
        product *= function_model::deriv(spec, *z)?;
    }
    Ok(product)
}

/// Cross-checking oracle: plain Newton iteration on `g(z) = f^n(z) - z`,
/// independent of the inverse-branch machinery.
pub fn newton_refine(spec: &FunctionSpec, n: u32, z0: Complex64, tol: f64) -> Result<Complex64> {
    let mut z = z0;
    for _ in 0..REFINE_MAX_ITER {
        // Forward orbit and chain-rule derivative.
        let mut value = z;
        let mut dprod = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            dprod *= function_model::deriv(spec, value)?;
            value = function_model::eval(spec, value)?;
        }
        let g = value - z;
        if g.norm() <= tol {
            return Ok(z);
        }
        let gp = dprod - 1.0;
        if gp.norm() < 1e-14 {
            return Err(Error::DerivativeSingular { modulus: gp.norm() });
        }
        z -= g / gp;
    }
    Err(Error::NoConvergence { iterations: REFINE_MAX_ITER })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{build_partition, build_partition_with_floor};
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp1() -> FunctionSpec {
        FunctionSpec::exp_family(c(1.0, 0.0)).unwrap()
    }

    fn id(k: i32) -> DomainId {
        DomainId { tract: 0, branch: k }
    }

    fn itinerary(ks: &[i32]) -> Itinerary {
        Itinerary::new(ks.iter().map(|&k| id(k)).collect()).unwrap()
    }

    #[test]
    fn psi_single_branch_examples() {
        let spec = exp1();
        // R < 1 configuration where branch 0 exists as a branch of the
        // inverse (the domain still meets the disk, so only psi_s runs).
        let part = build_partition_with_floor(&spec, 0.6, PI, 0.25).unwrap();
        let z = psi_s(&spec, &part, &itinerary(&[0]), c(2.0f64.exp(), 0.0)).unwrap();
        assert!((z - 2.0).norm() < 1e-13);

        let part = build_partition(&spec, 1.0, PI).unwrap();
        let z = psi_s(&spec, &part, &itinerary(&[1]), c(1.0f64.exp(), 0.0)).unwrap();
        assert!((z - c(1.0, TAU)).norm() < 1e-13);
    }

    #[test]
    fn psi_two_branch_composition() {
        // Frozen from two principal-log evaluations:
        // Log(Log 10 - 2 pi i) + 2 pi i.
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let z = psi_s(&spec, &part, &itinerary(&[1, -1]), c(10.0, 0.0)).unwrap();
        assert!((z - c(1.9008843307496956, 5.0636584639010893)).norm() < 1e-12);
        // f^2 returns to the argument.
        let f2 = function_model::eval(&spec, function_model::eval(&spec, z).unwrap()).unwrap();
        assert!((f2 - 10.0).norm() < 1e-10);
    }

    #[test]
    fn psi_rejects_bad_input() {
        let spec = exp1();
        let part = build_partition(&spec, 2.0, PI).unwrap();
        let err = psi_s(&spec, &part, &itinerary(&[1]), c(0.5, 0.0)).unwrap_err();
        assert!(matches!(err, Error::OffDomain { .. }));
    }

    #[test]
    fn exp_fixed_point_fixture() {
        // Frozen from an independent Newton run on e^z - z = 0 seeded at
        // 2 + 7.5i.
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let res = solve_periodic(&spec, &part, &itinerary(&[1]), 1e-12, 200).unwrap();
        let expected = c(2.0622777295982839, 7.5886311784725127);
        assert!((res.point - expected).norm() < 1e-9, "point {}", res.point);
        // Exponential family identity: f'(w) = e^w = w.
        assert!((res.multiplier - res.point).norm() <= 1e-9 * res.point.norm());
        assert!((res.multiplier_modulus - 7.8638611760942334).abs() < 1e-8);
        assert!(res.multiplier_modulus > 1.0);
        assert!(res.residual <= 10.0 * 1e-12 * res.point.norm().max(1.0));
        assert_eq!(res.orbit.len(), 1);
        assert_eq!(res.orbit[0], res.point);
    }

    #[test]
    fn conjugate_branch_gives_conjugate_point() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let plus = solve_periodic(&spec, &part, &itinerary(&[1]), 1e-12, 200).unwrap();
        let minus = solve_periodic(&spec, &part, &itinerary(&[-1]), 1e-12, 200).unwrap();
        assert!((minus.point - plus.point.conj()).norm() < 1e-9);
    }

    #[test]
    fn repeated_word_returns_same_point() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let once = solve_periodic(&spec, &part, &itinerary(&[1]), 1e-12, 200).unwrap();
        let twice = solve_periodic(&spec, &part, &itinerary(&[1, 1]), 1e-12, 200).unwrap();
        assert!((once.point - twice.point).norm() < 1e-9);
    }

    #[test]
    fn period_two_fixture() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let res = solve_periodic(&spec, &part, &itinerary(&[1, -1]), 1e-12, 300).unwrap();
        let expected = c(1.668024051576096, 5.0324470644861572);
        assert!((res.point - expected).norm() < 1e-9, "point {}", res.point);
        assert_eq!(res.orbit.len(), 2);
        assert!((res.orbit[1] - res.point.conj()).norm() < 1e-9);
        // f' = f for this family, so the multiplier is the orbit product.
        let orbit_product: Complex64 = res.orbit.iter().product();
        assert!((res.multiplier - orbit_product).norm() <= 1e-9 * res.multiplier.norm());
        assert!((res.multiplier_modulus - 28.10782769349165).abs() < 1e-7);
    }

    #[test]
    fn multiplier_examples() {
        let spec = exp1();
        // Single fixed point of e^z: multiplier equals the point itself.
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let res = solve_periodic(&spec, &part, &itinerary(&[2]), 1e-12, 200).unwrap();
        let m = multiplier(&spec, &res.orbit).unwrap();
        assert!((m - res.point).norm() <= 1e-9 * res.point.norm());

        // A single-factor product with f'(z) = 1: sin with lambda = 1 at 0.
        let sin1 = FunctionSpec::sin_family(c(1.0, 0.0)).unwrap();
        let m = multiplier(&sin1, &[c(0.0, 0.0)]).unwrap();
        assert!((m - 1.0).norm() < 1e-15);
    }

    #[test]
    fn proper_power_detection() {
        assert!(is_proper_power(&itinerary(&[1, 1])));
        assert!(!is_proper_power(&itinerary(&[1, -1])));
        assert!(is_proper_power(&itinerary(&[1, 2, 1, 2])));
        assert!(!is_proper_power(&itinerary(&[1])));
        assert!(!is_proper_power(&itinerary(&[1, 2, 1])));
        assert!(is_proper_power(&itinerary(&[3, 3, 3])));
    }

    #[test]
    fn newton_refine_agrees_with_solver() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let res = solve_periodic(&spec, &part, &itinerary(&[1]), 1e-12, 200).unwrap();
        let refined = newton_refine(&spec, 1, res.point, 1e-12).unwrap();
        assert!((refined - res.point).norm() < 1e-8);

        // Oracle run from a coarse seed.
        let refined = newton_refine(&spec, 1, c(2.0, 7.5), 1e-12).unwrap();
        assert!((refined - c(2.0622777295982839, 7.5886311784725127)).norm() < 1e-10);

        let res2 = solve_periodic(&spec, &part, &itinerary(&[1, -1]), 1e-12, 300).unwrap();
        let refined = newton_refine(&spec, 2, res2.point, 1e-12).unwrap();
        assert!((refined - res2.point).norm() < 1e-8);
    }

    #[test]
    fn newton_refine_singular_derivative() {
        // Near z = 0 the map sin has g'(z) = cos z - 1 ~ -z^2/2, below the
        // singularity threshold, while g(z) = sin z - z stays above tol.
        let sin1 = FunctionSpec::sin_family(c(1.0, 0.0)).unwrap();
        let err = newton_refine(&sin1, 1, c(1e-7, 0.0), 1e-30).unwrap_err();
        assert!(matches!(err, Error::DerivativeSingular { .. }));
    }

    #[test]
    fn geometric_convergence_tail() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        for ks in [vec![1], vec![2], vec![-3], vec![1, -2], vec![2, 3, -1]] {
            let s = Itinerary::new(ks.iter().map(|&k| id(k)).collect()).unwrap();
            let res = solve_periodic(&spec, &part, &s, 1e-12, 300).unwrap();
            let tail: Vec<f64> =
                res.step_ratios.iter().rev().take(5).copied().collect();
            assert!(!tail.is_empty());
            let max_tail = tail.iter().cloned().fold(0.0f64, f64::max);
            assert!(max_tail < 1.0, "tail ratios not contracting: {tail:?}");
        }
    }

    #[test]
    fn shift_equivariance_short_words() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        for ks in [vec![1, -1], vec![1, 2], vec![2, -1, 1], vec![1, 2, 3]] {
            let s = Itinerary::new(ks.iter().map(|&k| id(k)).collect()).unwrap();
            let w = solve_periodic(&spec, &part, &s, 1e-12, 300).unwrap();
            let shifted = solve_periodic(&spec, &part, &s.cyclic_shift(), 1e-12, 300).unwrap();
            let fw = function_model::eval(&spec, w.point).unwrap();
            assert!(
                (fw - shifted.point).norm() <= 1e-8,
                "shift equivariance violated for {ks:?}"
            );
        }
    }

    #[test]
    fn uncertified_domain_rejected() {
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let err = solve_periodic(&spec, &part, &itinerary(&[0]), 1e-12, 200).unwrap_err();
        assert!(matches!(err, Error::DomainNotCertified { .. }));
    }

    #[test]
    fn sin_fixed_point_fixture() {
        // Frozen from an independent run of the same contraction in Python.
        let spec = FunctionSpec::sin_family(c(1.0, 0.0)).unwrap();
        let part = build_partition(&spec, 2.0, PI).unwrap();
        let s = Itinerary::new(vec![DomainId { tract: 0, branch: -1 }]).unwrap();
        let res = solve_periodic(&spec, &part, &s, 1e-12, 300).unwrap();
        let expected = c(7.4976762777763852, 2.7686782829873215);
        assert!((res.point - expected).norm() < 1e-9, "point {}", res.point);
        assert!((res.multiplier_modulus - 7.9450658561163774).abs() < 1e-8);
        // Independent oracle agreement.
        let refined = newton_refine(&spec, 1, res.point, 1e-12).unwrap();
        assert!((refined - res.point).norm() < 1e-8);

        // Real lambda: the mirror domain on the lower tract carries the
        // complex conjugate point.
        let mirror = Itinerary::new(vec![DomainId { tract: 1, branch: 1 }]).unwrap();
        let res_low = solve_periodic(&spec, &part, &mirror, 1e-12, 300).unwrap();
        assert!((res_low.point - res.point.conj()).norm() < 1e-9);
    }

    #[test]
    fn eol_fixed_point_fixtures() {
        let spec = FunctionSpec::exp_over_linear(c(0.0, 0.0)).unwrap();
        let part = build_partition(&spec, 10.0, PI).unwrap();
        let expect = [
            (2, c(5.544138030306164, 14.999886056683751), 15.673090701963366),
            (3, c(6.2099541437840493, 21.4269666226025), 22.051270276935398),
        ];
        for (k, point, modulus) in expect {
            let res = solve_periodic(&spec, &part, &itinerary(&[k]), 1e-12, 300).unwrap();
            assert!((res.point - point).norm() < 1e-8, "k={k} point {}", res.point);
            assert!((res.multiplier_modulus - modulus).abs() < 1e-6);
            assert!(res.residual <= 1e-9);
            let refined = newton_refine(&spec, 1, res.point, 1e-12).unwrap();
            assert!((refined - res.point).norm() < 1e-8);
        }
    }

    /// Far-out strips exercise the certified half-plane contraction bound
    /// non-vacuously: iterates there satisfy Re phi >= 2 pi.
    #[test]
    fn hyperbolic_step_ratios_respect_certified_bound() {
        use crate::hyperbolic::{contraction_ratio_bound, distance_halfplane, kappa_for_threshold};
        let spec = exp1();
        let part = build_partition(&spec, 1.0, PI).unwrap();
        let s = itinerary(&[100]);
        let (_, trace) = solve_periodic_traced(&spec, &part, &s, 1e-12, 300).unwrap();
        let phis: Vec<Complex64> = trace
            .iter()
            .map(|z| part.phi(&spec, 0, *z).unwrap())
            .collect();
        let kappa = kappa_for_threshold(0.5);
        let mut tested = 0;
        let mut kappa_applicable = 0;
        for m in 0..phis.len().saturating_sub(2) {
            if phis[m].re < TAU {
                continue;
            }
            let d1 = distance_halfplane(phis[m], phis[m + 1]).unwrap();
            let d2 = distance_halfplane(phis[m + 1], phis[m + 2]).unwrap();
            if d1 == 0.0 {
                continue;
            }
            let bound = contraction_ratio_bound(phis[m].re.min(phis[m + 1].re));
            assert!(
                d2 / d1 <= bound + 1e-6,
                "ratio {} exceeds certified bound {}",
                d2 / d1,
                bound
            );
            // Where a KappaEstimate guarantees contraction, the measured
            // half-plane ratio proxy must not exceed 1.
            if phis[m].re >= kappa.validity_threshold
                && phis[m + 1].re >= kappa.validity_threshold
            {
                assert!(d2 / d1 <= 1.0, "ratio above 1 inside validity region");
                kappa_applicable += 1;
            }
            tested += 1;
        }
        assert!(tested > 0, "expected at least one applicable iterate triple");
        assert!(kappa_applicable > 0, "kappa validity region never entered");
    }
}
