//! Periodic-box discretization, Fourier multipliers, propagators and projectors.

mod block;
mod fft;
mod field;
mod grid;
pub mod io;
mod ladder;
mod ops;
mod projectors;

pub use block::{tukey, BandKind, SpaceTimeBlock, TemporalMode, MIN_TEMPORAL_SAMPLES};
pub use fft::{fft_axis, forward as fft_forward_raw, inverse as fft_inverse_raw};
pub use field::{Field, Rep};
pub use grid::{Grid, MAX_POINTS};
pub use ladder::{
    chi_band, chi_low, eta0, is_dyadic, lateral_phi, smooth_step, DyadicLadder, DEFAULT_K,
    ETA_PLATEAU, ETA_SUPPORT,
};
pub use ops::{
    abs_grad, abs_grad_pow, abs_pow_symbol, apply_multiplier, apply_radial, bessel_pow, dealias,
    gradient, laplacian, partial, scale_spectral_radial, schrodinger_propagate, wave_propagate,
};
pub use projectors::{decompose_angular, lateral_project, lp_profile, lp_project, ProjKind};
