//! Numerical core for comparing real-time (unitary) and imaginary-time
//! (non-negative) quantum evolution.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function over immutable values; file formats, configuration and the
//! experiment runner live in the `wickbell` companion crate.
//!
//! Modules:
//! - [`grid`]: uniform 1-D grids, wavefunctions, kernels and their action.
//! - [`kernels`]: closed-form and time-sliced transition kernels.
//! - [`phase_space`]: Wigner transform, phase-space averages, negativity ratio.
//! - [`evolution`]: density-matrix evolution in both time regimes.
//! - [`epr`]: two-particle position-correlated states under free propagation.
//! - [`spin_geom`]: spin coherent states and geometric (Wess-Zumino) phases.
//! - [`bell`]: two-qubit correlations, CHSH optimisation and decay.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bell;
pub mod epr;
mod error;
pub mod evolution;
pub mod fft;
pub mod grid;
pub mod kernels;
pub mod linalg;
pub mod phase_space;
pub mod spin_geom;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version string embedded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
