//! Rescaling transforms between the stochastic system and its random-PDE
//! equivalents, and the refined restart at a mesh time.
//!
//! Both rescaled frames use the gauge `G(t) = W₁(t) − μ̂ t` (pointwise `μ̂`):
//! `u = e^{−G}X`, `v = Y − 𝒯_t(W₂)`. For real modes `μ̂ = 0`; for the single
//! constant mode `ic` there is no wave noise, so `v = Y`.

use num_complex::Complex64;

use super::state::{Frame, ZakharovState};
use crate::error::Result;
use crate::noise::{NoiseModel, NoisePath};
use crate::spectral::{self, Field};

/// The rescaled frame matching a noise model.
pub fn rescaled_frame_for(model: &NoiseModel) -> Frame {
    if model.is_conservative() {
        Frame::RescaledConservative
    } else {
        Frame::RescaledNonconservative
    }
}

/// Gauge `G = W₁ − μ̂·t` at mesh index `s`.
pub fn gauge_at_step(model: &NoiseModel, path: &NoisePath, s: usize) -> Field {
    let mut g = model.w1_at_step(path, s);
    if !model.is_conservative() {
        let t = s as f64 * path.dt();
        let mh = model.mu_hat_field();
        for (o, m) in g.data_mut().iter_mut().zip(mh.data()) {
            *o -= m * t;
        }
    }
    g
}

fn exp_times(g: &Field, sign: f64, x: &Field) -> Field {
    g.zip_map(x, |a, b| (a * sign).exp() * b)
        .expect("same grid")
}

/// `(X, Y) ↦ (e^{−G}X, Y − 𝒯_t(W₂))`.
pub fn to_rescaled(
    state: &ZakharovState,
    model: &NoiseModel,
    path: &NoisePath,
) -> Result<ZakharovState> {
    state.expect_frame(Frame::Direct)?;
    let s = path.step_of(state.t)?;
    let g = gauge_at_step(model, path, s);
    let tconv = model.stochastic_convolution(path, state.t)?;
    ZakharovState::new(
        exp_times(&g, -1.0, &state.x),
        &state.y.physical() - &tconv,
        state.t,
        rescaled_frame_for(model),
    )
}

/// Inverse of [`to_rescaled`].
pub fn to_direct(
    state: &ZakharovState,
    model: &NoiseModel,
    path: &NoisePath,
) -> Result<ZakharovState> {
    state.expect_frame(rescaled_frame_for(model))?;
    let s = path.step_of(state.t)?;
    let g = gauge_at_step(model, path, s);
    let tconv = model.stochastic_convolution(path, state.t)?;
    ZakharovState::new(
        exp_times(&g, 1.0, &state.x),
        &state.y.physical() + &tconv,
        state.t,
        Frame::Direct,
    )
}

/// Refined restart at the mesh time `σ`.
///
/// Takes the rescaled state at `σ` and returns `(u_σ(0), v_σ(0)) =
/// (e^{G(σ)}u(σ), v(σ) + 𝒯_σ(W₂))` at local time 0, together with the
/// increment path `β(σ + ·) − β(σ)` that drives the restarted system.
pub fn refined_restart(
    state: &ZakharovState,
    sigma: f64,
    model: &NoiseModel,
    path: &NoisePath,
) -> Result<(ZakharovState, NoisePath)> {
    let frame = rescaled_frame_for(model);
    state.expect_frame(frame)?;
    let s = path.step_of(sigma)?;
    if (state.t - sigma).abs() > 1e-9 * sigma.abs().max(1.0) {
        return Err(crate::ZlabError::InvalidArgument(format!(
            "state time {} differs from restart time {sigma}",
            state.t
        )));
    }
    let g = gauge_at_step(model, path, s);
    let tconv = model.stochastic_convolution(path, sigma)?;
    let restarted = ZakharovState::new(
        exp_times(&g, 1.0, &state.x),
        &state.y.physical() + &tconv,
        0.0,
        frame,
    )?;
    Ok((restarted, path.restart(sigma)?))
}

/// Map a restarted state at local time `t` back to the original rescaled
/// frame at `σ + t`: `u = e^{−G(σ)}u_σ`, `v = v_σ − e^{it|∇|}𝒯_σ(W₂)`.
pub fn restart_inverse(
    local: &ZakharovState,
    sigma: f64,
    model: &NoiseModel,
    path: &NoisePath,
) -> Result<ZakharovState> {
    let frame = rescaled_frame_for(model);
    local.expect_frame(frame)?;
    let s = path.step_of(sigma)?;
    path.step_of(sigma + local.t)?;
    let g = gauge_at_step(model, path, s);
    let tconv = spectral::wave_propagate(&model.stochastic_convolution(path, sigma)?, local.t);
    ZakharovState::new(
        exp_times(&g, -1.0, &local.x),
        &local.y.physical() - &tconv.physical(),
        sigma + local.t,
        frame,
    )
}

/// `|e^{G}|²`, the weight of the wave forcing in the rescaled frame.
pub fn gauge_weight(g: &Field) -> Vec<f64> {
    g.data().iter().map(|v| (2.0 * v.re).exp()).collect()
}

pub(crate) fn mul_exp(x: &mut Field, g: &Field, a: Complex64) {
    for (o, v) in x.data_mut().iter_mut().zip(g.data()) {
        *o *= (v * a).exp();
    }
}
