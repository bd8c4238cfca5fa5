//! The geometric stage: disk complement, cut ray, tracts and indexed
//! fundamental domains.
//!
//! The cut is restricted to straight rays `{t e^{i angle}: t >= R}`. Its
//! preimages slice each tract into the half-plane strips of the logarithmic
//! coordinate; a fundamental domain is addressed by `(tract, branch)`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::function_model::{
    self, strip_bounds, FunctionSpec,
};

/// Default floor for the cut radius; keeps `log R >= 0` so the strip
/// geometry of the exponential family stays simple.
pub const DEFAULT_R_MIN: f64 = 1.0;

/// Number of sample points used to test that the cut ray avoids the tracts.
const DELTA_SAMPLES: usize = 256;
/// Largest modulus sampled on the cut ray.
const DELTA_SAMPLE_MAX: f64 = 1e6;

/// Symbolic address of one fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DomainId {
    pub tract: usize,
    pub branch: i32,
}

/// Conservative per-family description of where the branch-`k` domain of a
/// tract can possibly lie; used for the disk-avoidance certificate.
#[derive(Debug, Clone, PartialEq)]
enum DomainGeometry {
    /// Exponential family: the domain is exactly the half-strip
    /// `{x > x_min} x {im_offset + 2 pi (k-1) < y < im_offset + 2 pi k}`.
    HalfStrip { x_min: f64, im_offset: f64 },
    /// Sine family: the domain is contained in a vertical half-plane band
    /// `{|y| >= y_min}` (sign per tract) with `x` in a slack-widened
    /// interval determined by the branch index.
    SinBand { upper: bool, y_min: f64, arg_anchor: f64, slack: f64 },
    /// exp(z)/(z - p): half-strip bounds refined iteratively from the tract
    /// inequality `x > ln R + ln |z - p|` and `|arg(z - p)| < pi/2`.
    PoleStrip { pole: Complex64 },
}

/// Descriptor of one tract: index, anchor for the logarithmic coordinate,
/// and the recorded analytic description.
#[derive(Debug, Clone, PartialEq)]
pub struct TractDescriptor {
    pub index: usize,
    pub base_point: Complex64,
    pub base_phi: Complex64,
    pub description: String,
    geometry: DomainGeometry,
}

/// The triple (disk complement, cut ray, indexed fundamental domains).
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSpec {
    pub radius: f64,
    pub delta_angle: f64,
    pub tracts: Vec<TractDescriptor>,
}

/// Builds the partition with the default radius floor.
pub fn build_partition(spec: &FunctionSpec, r: f64, delta_angle: f64) -> Result<PartitionSpec> {
    build_partition_with_floor(spec, r, delta_angle, DEFAULT_R_MIN)
}

/// Builds the partition with an explicit radius floor.
pub fn build_partition_with_floor(
    spec: &FunctionSpec,
    r: f64,
    delta_angle: f64,
    r_min: f64,
) -> Result<PartitionSpec> {
    // Strictly above the singular radius; the configured floor is inclusive.
    let sing = function_model::singular_radius(spec);
    if r.is_nan() || r <= sing {
        return Err(Error::RadiusTooSmall { radius: r, min: sing });
    }
    if r < r_min {
        return Err(Error::RadiusTooSmall { radius: r, min: r_min });
    }
    let angle = delta_angle.rem_euclid(TAU);

    // The cut ray must stay clear of every tract closure; validated by
    // sampling geometrically spaced points out to large modulus.
    for tract in 0..spec.tract_count() {
        for j in 0..DELTA_SAMPLES {
            let t = r * (DELTA_SAMPLE_MAX / r).powf(j as f64 / (DELTA_SAMPLES - 1) as f64);
            let z = Complex64::from_polar(t, angle);
            if function_model::in_tract(spec, r, tract, z, 1e-9) {
                return Err(Error::DeltaMeetsTract { angle, tract });
            }
        }
    }

    let mut tracts = Vec::with_capacity(spec.tract_count());
    for index in 0..spec.tract_count() {
        let base_point = function_model::base_point(spec, r, index);
        let base_phi = function_model::phi(spec, r, index, base_point)?;
        let (geometry, description) = match spec {
            FunctionSpec::ExpFamily { lambda } => (
                DomainGeometry::HalfStrip {
                    x_min: (r / lambda.norm()).ln(),
                    im_offset: angle - lambda.arg(),
                },
                format!("half-plane Re z > {:.6}, strips of height 2 pi", (r / lambda.norm()).ln()),
            ),
            FunctionSpec::SinFamily { lambda } => {
                let upper = index == 0;
                let y_min = function_model::sin_tract_y_min(r, lambda.norm());
                let q0 = (-2.0 * y_min).exp().min(1.0);
                let slack = q0.asin();
                let arg_anchor = if upper {
                    (Complex64::i() * lambda).arg()
                } else {
                    (-Complex64::i() * lambda).arg()
                };
                (
                    DomainGeometry::SinBand { upper, y_min, arg_anchor, slack },
                    format!(
                        "{} half-plane end of |lambda sin z| > R, |Im z| >= {:.6}",
                        if upper { "upper" } else { "lower" },
                        y_min
                    ),
                )
            }
            FunctionSpec::ExpOverLinear { pole } => (
                DomainGeometry::PoleStrip { pole: *pole },
                "right-hand tract of |e^z| > R |z - p|".to_string(),
            ),
        };
        tracts.push(TractDescriptor { index, base_point, base_phi, description, geometry });
    }

    Ok(PartitionSpec { radius: r, delta_angle: angle, tracts })
}

impl PartitionSpec {
    /// True iff the fundamental domain provably does not meet the closed
    /// singular disk. `false` means "not certified", not "intersects".
    pub fn domain_avoids_disk(&self, id: DomainId) -> bool {
        let Some(tract) = self.tracts.get(id.tract) else { return false };
        let r = self.radius;
        match &tract.geometry {
            DomainGeometry::HalfStrip { x_min, im_offset } => {
                let y_lo = im_offset + TAU * (f64::from(id.branch) - 1.0);
                let y_hi = y_lo + TAU;
                dist_origin_to_box(*x_min, y_lo, y_hi) > r
            }
            DomainGeometry::SinBand { upper, y_min, arg_anchor, slack } => {
                let (lo, hi) = strip_bounds(self.delta_angle, id.branch);
                // On the upper tract Im phi = -x + anchor + eta, |eta| <= slack;
                // on the lower tract Im phi = x + anchor + eta.
                let (x_lo, x_hi) = if *upper {
                    (arg_anchor - hi - slack, arg_anchor - lo + slack)
                } else {
                    (lo - arg_anchor - slack, hi - arg_anchor + slack)
                };
                let dx = if x_lo <= 0.0 && 0.0 <= x_hi { 0.0 } else { x_lo.abs().min(x_hi.abs()) };
                dx.hypot(*y_min) > r
            }
            DomainGeometry::PoleStrip { pole } => eol_domain_avoids_disk(r, self.delta_angle, *pole, id.branch),
        }
    }

    /// All domains with `|branch| <= k_max` that pass the disk-avoidance
    /// certificate, across all tracts, in lexicographic order.
    pub fn domain_window(&self, k_max: u32) -> Result<Vec<DomainId>> {
        let mut out = Vec::new();
        for tract in 0..self.tracts.len() {
            for k in -(k_max as i32)..=(k_max as i32) {
                let id = DomainId { tract, branch: k };
                if self.domain_avoids_disk(id) {
                    out.push(id);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyWindow);
        }
        out.sort();
        Ok(out)
    }

    /// Domain membership with slack `tol` on the strip bounds. Points inside
    /// the tract are assigned by the imaginary part of the logarithmic
    /// coordinate.
    pub fn in_domain(&self, spec: &FunctionSpec, id: DomainId, z: Complex64, tol: f64) -> bool {
        if !function_model::in_tract(spec, self.radius, id.tract, z, tol) {
            return false;
        }
        let Ok(p) = function_model::phi(spec, self.radius, id.tract, z) else {
            return false;
        };
        let (lo, hi) = strip_bounds(self.delta_angle, id.branch);
        p.im > lo - tol && p.im < hi + tol
    }

    /// The `(tract, branch)` address of the domain containing `z`, if `z`
    /// lies in a tract.
    pub fn assign_domain(&self, spec: &FunctionSpec, z: Complex64) -> Option<DomainId> {
        for tract in 0..self.tracts.len() {
            if !function_model::in_tract(spec, self.radius, tract, z, 0.0) {
                continue;
            }
            if let Ok(p) = function_model::phi(spec, self.radius, tract, z) {
                let k = ((p.im - self.delta_angle) / TAU).floor() as i32 + 1;
                return Some(DomainId { tract, branch: k });
            }
        }
        None
    }

    /// True iff `w` lies in the cut disk complement of this partition.
    pub fn in_omega_minus_delta(&self, w: Complex64) -> bool {
        function_model::in_omega_minus_delta(self.radius, self.delta_angle, w)
    }

    /// The inverse branch attached to domain `id`.
    pub fn inverse_branch(&self, spec: &FunctionSpec, id: DomainId, w: Complex64) -> Result<Complex64> {
        function_model::inverse_branch(spec, self.radius, self.delta_angle, id, w)
    }

    /// The logarithmic coordinate of the indexed tract.
    pub fn phi(&self, spec: &FunctionSpec, tract: usize, z: Complex64) -> Result<Complex64> {
        function_model::phi(spec, self.radius, tract, z)
    }
}

fn dist_origin_to_box(x_min: f64, y_lo: f64, y_hi: f64) -> f64 {
    let dx = x_min.max(0.0);
    let dy = if y_lo <= 0.0 && 0.0 <= y_hi { 0.0 } else { y_lo.abs().min(y_hi.abs()) };
    dx.hypot(dy)
}

/// Certified disk avoidance for exp(z)/(z-p) domains.
///
/// Starts from the containment `F_k` in `{x >= ln R} x {Im phi +/- pi/2}`
/// and tightens it: the signed range of `arg(z - p)` over the current box
/// sharpens the `y` bounds, which push the tract inequality
/// `x >= ln R + ln |z - p|` further right. A few rounds certify domains the
/// one-shot box misses.
fn eol_domain_avoids_disk(r: f64, delta_angle: f64, pole: Complex64, branch: i32) -> bool {
    let (c1, c2) = strip_bounds(delta_angle, branch);
    let mut x_lo = r.ln(); // tract stays outside the unit disk around the pole
    let mut y_lo = c1 - FRAC_PI_2;
    let mut y_hi = c2 + FRAC_PI_2;
    for _ in 0..8 {
        let dx_min = x_lo - pole.re;
        if dx_min <= 0.0 {
            break;
        }
        // Signed extremes of arg(z - p) over {x >= x_lo, y in [y_lo, y_hi]}.
        let dy_lo = y_lo - pole.im;
        let dy_hi = y_hi - pole.im;
        let a_min = if dy_lo <= 0.0 { dy_lo.atan2(dx_min).max(-FRAC_PI_2) } else { 0.0 };
        let a_max = if dy_hi >= 0.0 { dy_hi.atan2(dx_min).min(FRAC_PI_2) } else { 0.0 };
        y_lo = c1 + a_min;
        y_hi = c2 + a_max;
        // Distance from the pole to the refined box bounds |z - p| from below.
        let dxp = (x_lo - pole.re).max(0.0);
        let dyp = if y_lo - pole.im <= 0.0 && 0.0 <= y_hi - pole.im {
            0.0
        } else {
            (y_lo - pole.im).abs().min((y_hi - pole.im).abs())
        };
        let r_lo = dxp.hypot(dyp).max(1.0);
        x_lo = r.ln() + r_lo.ln();
    }
    dist_origin_to_box(x_lo, y_lo, y_hi) > r
}
