//! Simulation toolkit for a single 12-cavity kagome photonic cell.
//!
//! The cell is a star of corner-sharing triangles: six inner sites on a
//! hexagon (degree 4) and six outer tips (degree 2), coupled by photon
//! hopping with per-bond strengths. Two engines operate on the same model:
//!
//! - [`fock`]: exact diagonalization in fixed photon-number sectors, the
//!   reference method at desk scale (N ≤ 5), plus real-time dynamics support.
//! - [`peps`]: a variational projected entangled-pair state over the cell,
//!   optimized by sweeping local generalized eigenproblems.
//!
//! [`dynamics`] computes two-point photon-number correlations under spectral
//! time evolution, and [`experiments`] layers disorder sampling, chemical
//! potential scans and PEPS-vs-ED benchmarks on top.

// openblas-src provides the LAPACK symbols for lapack-sys; the crate must be
// referenced for its link flags to apply.
use openblas_src as _;

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod linalg;
pub mod peps;
pub mod topology;

pub use error::{Error, Result};
