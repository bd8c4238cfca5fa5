//! Error type shared by all modules.

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point {z} is within tolerance of the pole at {pole}")]
    PoleHit { z: Complex64, pole: Complex64 },

    #[error("radius {radius} does not exceed the required minimum {min}")]
    RadiusTooSmall { radius: f64, min: f64 },

    #[error("point lies outside the tract (Re phi = {re_phi})")]
    OutsideTract { re_phi: f64 },

    #[error("tract index {index} out of range (family has {count})")]
    BadTractIndex { index: usize, count: usize },

    #[error("w = {w} lies outside the cut disk complement")]
    OffDomain { w: Complex64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: u32 },

    #[error("refined point landed outside fundamental domain {tract}:{branch}")]
    BranchEscape { tract: usize, branch: i32 },

    #[error("branch index {branch} is outside the supported window (seed residual {residual:.3e})")]
    BranchWindowExceeded { branch: i32, residual: f64 },

    #[error("Re z = {re} is not positive")]
    OutsideHalfPlane { re: f64 },

    #[error("cut ray at angle {angle} meets the closure of tract {tract}")]
    DeltaMeetsTract { angle: f64, tract: usize },

    #[error("no fundamental domain in the window avoids the singular disk")]
    EmptyWindow,

    #[error("intermediate image {z} exited the cut disk complement")]
    IntermediateOffDomain { z: Complex64 },

    #[error("multiplier modulus {modulus} is not > 1; numerical tolerance breached")]
    NotRepelling { modulus: f64 },

    #[error("residual {residual:.3e} exceeds the admissible bound {bound:.3e}")]
    ResidualExceeded { residual: f64, bound: f64 },

    #[error("orbit point {index} does not lie in its prescribed domain")]
    ItineraryViolation { index: usize },

    #[error("fundamental domain {tract}:{branch} is not certified to avoid the singular disk")]
    DomainNotCertified { tract: usize, branch: i32 },

    #[error("derivative modulus {modulus:.3e} too small for a Newton step")]
    DerivativeSingular { modulus: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
