use serde::{Deserialize, Serialize};

use super::frames::{mul_exp, rescaled_frame_for, to_rescaled};
use super::integrator::{RescaledDriver, Stepper};
use super::state::{Frame, ZakharovState};
use crate::error::{Result, ZlabError};
use crate::ground_state::energy;
use crate::noise::{NoiseModel, NoisePath};
use crate::spectral::{self, Field, Rep};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Direct,
    Rescaled,
}

/// Finite surrogates for the blow-up alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `M_blow` as a multiple of the initial `‖X‖_{H¹} + ‖Y‖_{L²}`.
    #[serde(default = "default_factor")]
    pub m_blow_factor: f64,
    /// `D_blow` for the accumulated `L²_t W^{1/2,4}` norm.
    #[serde(default = "default_d_blow")]
    pub d_blow: f64,
}

fn default_factor() -> f64 {
    1e3
}

fn default_d_blow() -> f64 {
    1e3
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            m_blow_factor: default_factor(),
            d_blow: default_d_blow(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub dt: f64,
    pub steps: usize,
    /// Store a full state every this many steps (and at the end).
    pub checkpoint_every: usize,
    /// Record diagnostics every this many steps (and at the end).
    pub diag_every: usize,
    pub scheme: Scheme,
    pub coupling: bool,
    pub thresholds: Thresholds,
}

impl RunSpec {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            checkpoint_every: steps.max(1),
            diag_every: 1,
            scheme: Scheme::Direct,
            coupling: true,
            thresholds: Thresholds::default(),
        }
    }
}

/// Diagnostic series sampled along a trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub h1_x: Vec<f64>,
    pub l2_y: Vec<f64>,
    pub d_accum: Vec<f64>,
}

impl Diagnostics {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn push(&mut self, st: &ZakharovState, d_accum: f64) {
        self.t.push(st.t);
        self.mass.push(st.x.l2_norm_sq());
        self.energy.push(energy(&st.x, &st.y).unwrap_or(f64::NAN));
        self.h1_x.push(st.x.h1_norm());
        self.l2_y.push(st.y.l2_norm());
        self.d_accum.push(d_accum);
    }

    /// CSV with columns `t, mass, energy, h1_X, l2_Y, d_accum`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "mass", "energy", "h1_X", "l2_Y", "d_accum"])?;
        for i in 0..self.len() {
            wr.write_record(
                [
                    self.t[i],
                    self.mass[i],
                    self.energy[i],
                    self.h1_x[i],
                    self.l2_y[i],
                    self.d_accum[i],
                ]
                .iter()
                .map(|v| format!("{v:e}")),
            )?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    Global,
    Blowup { t: f64 },
    Undecided,
}

impl Outcome {
    pub fn is_blowup(&self) -> bool {
        matches!(self, Outcome::Blowup { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Direct-frame states; the first is the initial state.
    pub checkpoints: Vec<ZakharovState>,
    pub diagnostics: Diagnostics,
    pub outcome: Outcome,
    /// Planned final time.
    pub horizon: f64,
    /// `‖X₀‖_{H¹} + ‖Y₀‖_{L²}`.
    pub initial_norm: f64,
}

impl Trajectory {
    pub fn checkpoint_times(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|s| s.t).collect()
    }

    /// Checkpoint at mesh time `t`, if stored.
    pub fn state_at(&self, t: f64) -> Option<&ZakharovState> {
        self.checkpoints
            .iter()
            .find(|s| (s.t - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    pub fn final_state(&self) -> &ZakharovState {
        self.checkpoints
            .last()
            .expect("trajectory has an initial state")
    }
}

/// `‖⟨∇⟩^{1/2} f‖²_{L⁴}` from spectral data.
fn w_half4_sq(x_hat: &Field) -> f64 {
    let mut f = x_hat.clone();
    spectral::scale_spectral_radial(&mut f, |r| (1.0 + r * r).powf(0.25));
    f.set_rep(Rep::Physical);
    f.lp_norm(4.0).powi(2)
}

/// Classify a diagnostic series against the thresholds.
pub fn detect_blowup(
    diag: &Diagnostics,
    initial_norm: f64,
    horizon: f64,
    th: &Thresholds,
) -> Outcome {
    let m_blow = th.m_blow_factor * initial_norm.max(f64::MIN_POSITIVE);
    for i in 0..diag.len() {
        let norm = diag.h1_x[i] + diag.l2_y[i];
        let bad = !norm.is_finite() || !diag.d_accum[i].is_finite() || !diag.mass[i].is_finite();
        if bad || norm >= m_blow || diag.d_accum[i] >= th.d_blow {
            return Outcome::Blowup { t: diag.t[i] };
        }
    }
    match diag.t.last() {
        Some(&t) if t >= horizon - 1e-9 * horizon.abs().max(1.0) => Outcome::Global,
        _ => Outcome::Undecided,
    }
}

/// Integrate from a direct-frame state on the path mesh for `spec.steps` steps.
pub fn integrate(
    initial: &ZakharovState,
    model: &NoiseModel,
    path: &NoisePath,
    spec: &RunSpec,
) -> Result<Trajectory> {
    initial.expect_frame(Frame::Direct)?;
    if (spec.dt - path.dt()).abs() > 1e-12 * spec.dt {
        return Err(ZlabError::InvalidArgument(format!(
            "run dt {} differs from path dt {}",
            spec.dt,
            path.dt()
        )));
    }
    let s0 = path.step_of(initial.t)?;
    let s_end = s0 + spec.steps;
    if s_end > path.steps() {
        return Err(ZlabError::BeyondHorizon {
            t: s_end as f64 * spec.dt,
            horizon: path.horizon(),
        });
    }
    let grid = *initial.grid();
    let stepper = Stepper::with_coupling(grid, spec.dt, model, spec.coupling)?;
    let horizon = s_end as f64 * spec.dt;
    let initial_norm = initial.energy_norm();
    let m_blow = spec.thresholds.m_blow_factor * initial_norm.max(f64::MIN_POSITIVE);
    let ck = spec.checkpoint_every.max(1);
    let dg = spec.diag_every.max(1);

    let mut diag = Diagnostics::default();
    let mut checkpoints = vec![initial.clone()];
    let mut d_sq = 0.0;
    let mut last_diag_t = initial.t;
    diag.push(initial, 0.0);
    if !initial.is_finite() {
        let outcome = Outcome::Blowup { t: initial.t };
        return Ok(Trajectory {
            checkpoints,
            diagnostics: diag,
            outcome,
            horizon,
            initial_norm,
        });
    }

    let rescaled = spec.scheme == Scheme::Rescaled;
    let mut driver = rescaled.then(|| RescaledDriver::new(model, path, s0));
    let start = if rescaled {
        to_rescaled(initial, model, path)?
    } else {
        initial.clone()
    };
    let mut a = start.x.spectral();
    let mut b = start.y.spectral();
    let mut outcome = None;

    for s in s0..s_end {
        match driver.as_mut() {
            Some(dr) => {
                let ends = dr.advance();
                stepper.rescaled_step(&mut a, &mut b, &ends);
            }
            None => stepper.direct_step(&mut a, &mut b, model, path, s),
        }
        let k = s + 1 - s0;
        let t = (s + 1) as f64 * spec.dt;
        let want_diag = k % dg == 0 || s + 1 == s_end;
        let want_ck = k % ck == 0 || s + 1 == s_end;
        let finite = a.is_finite() && b.is_finite();
        if !(want_diag || want_ck || !finite) {
            continue;
        }
        let st = match driver.as_ref() {
            Some(dr) => {
                let mut x = a.physical();
                mul_exp(&mut x, dr.gauge(), Complex64::new(1.0, 0.0));
                let y = &b.physical() + dr.convolution();
                ZakharovState::new(x, y, t, Frame::Direct)?
            }
            None => ZakharovState::new(a.physical(), b.physical(), t, Frame::Direct)?,
        };
        if want_diag || !finite {
            let xs = st.x.spectral();
            let w = if xs.is_finite() {
                w_half4_sq(&xs)
            } else {
                f64::NAN
            };
            d_sq += (t - last_diag_t) * w;
            last_diag_t = t;
            diag.push(&st, d_sq.sqrt());
            let i = diag.len() - 1;
            let norm = diag.h1_x[i] + diag.l2_y[i];
            if !finite
                || !norm.is_finite()
                || norm >= m_blow
                || diag.d_accum[i] >= spec.thresholds.d_blow
                || !diag.d_accum[i].is_finite()
            {
                outcome = Some(Outcome::Blowup { t });
                checkpoints.push(st);
                break;
            }
        }
        if want_ck {
            checkpoints.push(st);
        }
    }
    let outcome =
        outcome.unwrap_or_else(|| detect_blowup(&diag, initial_norm, horizon, &spec.thresholds));
    Ok(Trajectory {
        checkpoints,
        diagnostics: diag,
        outcome,
        horizon,
        initial_norm,
    })
}

/// Glue a trajectory ending at `σ` with a restarted trajectory whose
/// checkpoints are in local time (already mapped back to direct variables).
/// Returns the glued trajectory and the `H¹ × L²` jump at `σ`.
pub fn glue(first: &Trajectory, restarted: &Trajectory, sigma: f64) -> Result<(Trajectory, f64)> {
    let end = first
        .state_at(sigma)
        .ok_or_else(|| ZlabError::InvalidArgument(format!("no checkpoint at σ = {sigma}")))?;
    let start = restarted
        .checkpoints
        .first()
        .expect("restarted trajectory is non-empty");
    let jump = end.distance(start);
    let mut checkpoints: Vec<ZakharovState> = first
        .checkpoints
        .iter()
        .filter(|s| s.t <= sigma + 1e-12)
        .cloned()
        .collect();
    for s in restarted.checkpoints.iter().skip(1) {
        let mut s = s.clone();
        s.t += sigma;
        checkpoints.push(s);
    }
    let mut diag = Diagnostics::default();
    let d1 = &first.diagnostics;
    let mut d_end = 0.0;
    for i in 0..d1.len() {
        if d1.t[i] <= sigma + 1e-12 {
            diag.t.push(d1.t[i]);
            diag.mass.push(d1.mass[i]);
            diag.energy.push(d1.energy[i]);
            diag.h1_x.push(d1.h1_x[i]);
            diag.l2_y.push(d1.l2_y[i]);
            diag.d_accum.push(d1.d_accum[i]);
            d_end = d1.d_accum[i];
        }
    }
    let d2 = &restarted.diagnostics;
    for i in 1..d2.len() {
        diag.t.push(d2.t[i] + sigma);
        diag.mass.push(d2.mass[i]);
        diag.energy.push(d2.energy[i]);
        diag.h1_x.push(d2.h1_x[i]);
        diag.l2_y.push(d2.l2_y[i]);
        diag.d_accum
            .push((d_end * d_end + d2.d_accum[i] * d2.d_accum[i]).sqrt());
    }
    let horizon = sigma + restarted.horizon;
    let outcome = match restarted.outcome {
        Outcome::Blowup { t } => Outcome::Blowup { t: t + sigma },
        o => o,
    };
    Ok((
        Trajectory {
            checkpoints,
            diagnostics: diag,
            outcome,
            horizon,
            initial_norm: first.initial_norm,
        },
        jump,
    ))
}

/// Frame used by [`integrate`] for the rescaled scheme (re-exported for callers).
pub fn scheme_frame(model: &NoiseModel, scheme: Scheme) -> Frame {
    match scheme {
        Scheme::Direct => Frame::Direct,
        Scheme::Rescaled => rescaled_frame_for(model),
    }
}
