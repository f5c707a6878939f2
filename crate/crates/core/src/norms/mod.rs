//! Discrete evaluation of the adapted Schrödinger, wave, lateral and
//! endpoint norms on space-time blocks, and empirical constant sweeps for
//! the linear and multilinear estimates built on them.

mod adapted;
mod lateral;
mod spec;
pub mod sweep;

pub use adapted::{
    d_norm, g_norm_upper, n_norm, n_pieces, n_total, s_norm, s_pieces, s_total, wave_norm,
    wave_pieces, wave_total, x_norm, x_norm_band, x_pieces, y_total, GNormReport, NormOptions,
    Regime, Splitting,
};
pub use lateral::lateral_norm;
pub use spec::{evaluate, NormFamily, NormRow, NormSpec};
