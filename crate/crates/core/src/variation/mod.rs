//! p-variation, `V^p`, Hölder and temporal Besov norms of sampled scalar
//! paths, and Monte-Carlo studies of the geometric Brownian motion.

mod besov;
mod gbm;
mod path;
mod pvar;

pub use besov::{besov_time_norm, l6_norm, temporal_bands, temporal_ladder, BesovOptions};
pub use gbm::{
    embedding_ratio, gbm_path, gbm_tail_experiment, gbm_vp_experiment, interpolation_ratio, median,
    quantile, scaled_gbm, tail_functional, TailExperiment, TailRow, VpExperiment, VpRow,
};
pub use path::SampledPath;
pub use pvar::{hoelder_norm, p_variation, p_variation_sum, vp_norm};
