use serde::{Deserialize, Serialize};

use super::frames::gauge_at_step;
use super::frames::mul_exp;
use super::trajectory::Trajectory;
use crate::error::{Result, ZlabError};
use crate::noise::{NoiseModel, NoisePath};
use crate::spectral::{self, Field};
use num_complex::Complex64;

/// Free-evolved, noise-corrected profiles at one checkpoint.
#[derive(Debug, Clone)]
pub struct Profile {
    pub t: f64,
    /// `e^{−itΔ} e^{μ̂t − W₁(t)} X(t)`.
    pub x: Field,
    /// `e^{−it|∇|} Y(t)`.
    pub y: Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterSummary {
    pub scatters: bool,
    /// Largest pairwise `‖Δx‖_{H¹} + ‖Δy‖_{L²}` relative to the initial `H¹ × L²` size.
    pub max_rel_diff: f64,
    /// `‖X(t_end)‖_{H¹}` at the last checkpoint examined.
    pub x_h1_end: f64,
}

#[derive(Debug, Clone)]
pub struct ScatterReport {
    pub summary: ScatterSummary,
    pub profiles: Vec<Profile>,
}

/// Cauchy test of the scattering profiles at (at least three) late checkpoints.
pub fn scattering_probe(
    traj: &Trajectory,
    model: &NoiseModel,
    path: &NoisePath,
    checkpoints: &[f64],
    tol: f64,
) -> Result<ScatterReport> {
    if checkpoints.len() < 3 {
        return Err(ZlabError::InvalidArgument(
            "scattering probe needs ≥ 3 checkpoints".into(),
        ));
    }
    let blown =
        |t: f64| matches!(traj.outcome, super::Outcome::Blowup { t: tb } if tb <= t + 1e-12);
    let mut profiles = Vec::with_capacity(checkpoints.len());
    let mut x_h1_end = f64::NAN;
    for &t in checkpoints {
        if blown(t) {
            break;
        }
        let st = traj.state_at(t).ok_or_else(|| {
            ZlabError::InvalidArgument(format!("no checkpoint stored at t = {t}"))
        })?;
        let s = path.step_of(t)?;
        let g = gauge_at_step(model, path, s);
        let mut z = st.x.physical();
        mul_exp(&mut z, &g, Complex64::new(-1.0, 0.0));
        x_h1_end = st.x.h1_norm();
        profiles.push(Profile {
            t,
            x: spectral::schrodinger_propagate(&z, -t),
            y: spectral::wave_propagate(&st.y, -t),
        });
    }
    let complete = profiles.len() == checkpoints.len() && !traj.outcome.is_blowup();
    let scale = traj.initial_norm.max(f64::MIN_POSITIVE);
    let mut max_rel_diff: f64 = 0.0;
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            let d = (&profiles[i].x - &profiles[j].x).h1_norm()
                + (&profiles[i].y - &profiles[j].y).l2_norm();
            max_rel_diff = max_rel_diff.max(d / scale);
        }
    }
    if !complete {
        max_rel_diff = f64::INFINITY;
    }
    Ok(ScatterReport {
        summary: ScatterSummary {
            scatters: complete && max_rel_diff <= tol,
            max_rel_diff,
            x_h1_end,
        },
        profiles,
    })
}
