//! Simulation and verification laboratory for equivariant Voronoi
//! cross-section tilings of `R^d` built from orbits of free torus
//! rotations by `Z^d`.
//!
//! The pipeline, bottom to top:
//!
//! * [`dynsys`]: lattice actions on tori by irrational rotation vectors,
//!   with a desk-checked freeness witness.
//! * [`marker`]: continuous bump functions along an orbit whose support
//!   pattern is `M`-separated and `L`-covering on the lattice.
//! * [`tiling`]: each marked orbit point becomes a weighted Voronoi
//!   center one dimension up; slicing the diagram at depth `H` yields an
//!   equivariant tiling of `R^d` by convex cells.
//! * [`lattice`]: quantitative counting of lattice points near convex
//!   boundaries (Steiner-type volume bounds) used to size tower heights.
//! * [`towers`]: Rokhlin towers cut out of the tiling (disjointness and
//!   coverage checks), boundary covers, and the two-tower construction.
//! * [`comparison`]: orbit-density certificates that render the rank
//!   comparison between two open sets as finite, replayable checks.
//!
//! Everything is deterministic under a caller-supplied seed; reports are
//! plain data designed to serialize byte-identically.

pub mod comparison;
pub mod dynsys;
mod error;
pub mod geometry;
pub mod lattice;
pub mod marker;
pub mod report;
pub mod svg;
pub mod tiling;
pub mod towers;

pub use error::{Error, Result};

/// Geometric tolerance: distances below this are treated as zero
/// (boundary incidence, halfspace equality, active-center cutoff).
pub const TAU_GEO: f64 = 1e-9;
