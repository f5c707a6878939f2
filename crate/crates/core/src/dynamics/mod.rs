//! Time integration of the stochastic Zakharov system and its rescaled equivalents.

mod frames;
mod integrator;
mod scattering;
mod state;
mod trajectory;

pub use frames::{
    gauge_at_step, gauge_weight, refined_restart, rescaled_frame_for, restart_inverse, to_direct,
    to_rescaled,
};
pub use integrator::{step_direct, step_rescaled, RescaledDriver, StepEnds, Stepper};
pub use scattering::{scattering_probe, Profile, ScatterReport, ScatterSummary};
pub use state::{Frame, ZakharovState};
pub use trajectory::{
    detect_blowup, glue, integrate, scheme_frame, Diagnostics, Outcome, RunSpec, Scheme,
    Thresholds, Trajectory,
};
