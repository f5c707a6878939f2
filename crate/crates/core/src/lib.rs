//! Pseudo-spectral simulation and diagnostics for the energy-critical
//! stochastic Zakharov system on a periodic surrogate of ℝ^d.
//!
//! The crate is organised by subsystem:
//!
//! * [`spectral`]: grids, fields, FFTs, Fourier multipliers, exact linear
//!   propagators and Littlewood-Paley / modulation / lateral projectors.
//! * [`noise`]: Wiener noise models, counter-based Brownian paths, the
//!   stochastic convolution and the geometric Brownian motion.
//! * [`dynamics`]: split-step integrators for the direct and rescaled
//!   systems, refined restarts, blow-up detection and scattering probes.
//! * [`ground_state`]: the Aubin-Talenti ground state, Zakharov energy,
//!   variational constraints and the sub-threshold stopping functional.
//! * [`norms`]: discrete adapted function-space norms on space-time blocks.
//! * [`variation`]: p-variation, Hölder and temporal Besov norms of paths.
//! * [`harness`]: run configuration, Monte-Carlo orchestration and results.

pub mod dynamics;
pub mod error;
pub mod ground_state;
pub mod harness;
pub mod noise;
pub mod norms;
pub mod quadrature;
pub mod spectral;
pub mod variation;

pub use error::{Result, ZlabError};
pub use num_complex::Complex64;

/// Version string recorded in run results.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
