//! Wiener noise models, counter-based Brownian paths and derived objects.

mod model;
mod path;
mod rng;

pub use model::{
    geometric_bm, periodized_gaussian, Coefficients, ConvolutionTracker, HypothesisReport,
    NoiseModel, NoisePreset,
};
pub use path::NoisePath;
pub use rng::{GaussianStream, NoiseKey, Process, RNG_KEY_SCHEMA_VERSION};
