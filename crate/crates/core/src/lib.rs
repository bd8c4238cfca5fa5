//! Repelling periodic points of transcendental maps.
//!
//! For a map `f` with a bounded set of singular values and a logarithmic
//! singularity over infinity, every finite word of fundamental domains that
//! stay clear of the singular disk addresses exactly one repelling periodic
//! point. This crate realizes that construction numerically: it builds the
//! cut-plane partition, composes the univalent inverse branches prescribed by
//! an itinerary, and iterates the composition to its unique fixed point.
//!
//! Modules follow the pipeline:
//!
//! * [`function_model`] — the built-in families, their derivatives, singular
//!   radii, logarithmic coordinates and per-domain inverse branches;
//! * [`partition`] — the disk complement, the cut ray and the indexed
//!   fundamental domains;
//! * [`hyperbolic`] — half-plane metric estimates and contraction bounds;
//! * [`solver`] — branch composition, fixed-point iteration, multipliers;
//! * [`enumerator`] — batch enumeration of itineraries and aggregation.

pub mod enumerator;
pub mod error;
pub mod function_model;
pub mod hyperbolic;
pub mod partition;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
