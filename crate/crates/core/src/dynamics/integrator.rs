//! Strang split-step integrators.
//!
//! One step is `L(dt/2) ∘ Noise ∘ N(dt) ∘ L(dt/2)` (rightmost first) with exact
//! substeps:
//!
//! * `L`: `e^{−it|ξ|²}` on the Schrödinger part, `e^{it|ξ|}` on the wave part;
//! * `N`: `X ↦ e^{−i·dt·Re Y}X`, `Y ↦ Y + i·dt·|∇|D(|X|²)` with `D` the 2/3
//!   truncation (`Re Y` and `|X|` are invariant during this substep, so the
//!   two updates commute and are exact);
//! * `Noise`: `X ↦ e^{ΔW₁ − μ̂dt}X`, `Y ↦ Y − iΔW₂`, the pathwise solution of
//!   the linear Itô equation `dX = −μX dt + X dW₁`.
//!
//! The rescaled scheme replaces the noise substep by the lower-order terms
//! `i(b·∇u + cu)` with coefficients frozen at the mean of the step endpoints,
//! integrated by RK4.

use num_complex::Complex64;

use super::frames::{gauge_at_step, gauge_weight, rescaled_frame_for};
use super::state::{Frame, ZakharovState};
use crate::error::{Result, ZlabError};
use crate::noise::{Coefficients, ConvolutionTracker, NoiseModel, NoisePath};
use crate::spectral::{Field, Grid, Rep};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Precomputed spectral factors for a fixed `(grid, dt)`.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    dt: f64,
    coupling: bool,
    half_s: Vec<Complex64>,
    half_w: Vec<Complex64>,
    /// `|ξ|` on the 2/3 range, zero elsewhere.
    force: Vec<f64>,
    /// `e^{−μ̂ dt}` pointwise.
    damping: Vec<Complex64>,
    modes2_hat: Vec<Field>,
}

impl Stepper {
    pub fn new(grid: Grid, dt: f64, model: &NoiseModel) -> Result<Self> {
        Self::with_coupling(grid, dt, model, true)
    }

    /// `coupling = false` drops the nonlinear substep (linear stochastic flow).
    pub fn with_coupling(grid: Grid, dt: f64, model: &NoiseModel, coupling: bool) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ZlabError::InvalidArgument(format!(
                "time step {dt} must be positive"
            )));
        }
        if *model.grid() != grid {
            return Err(ZlabError::GridMismatch);
        }
        let r = grid.xi_norm_table();
        let mask = grid.dealias_mask();
        Ok(Self {
            grid,
            dt,
            coupling,
            half_s: r
                .iter()
                .map(|k| Complex64::from_polar(1.0, -0.5 * dt * k * k))
                .collect(),
            half_w: r
                .iter()
                .map(|k| Complex64::from_polar(1.0, 0.5 * dt * k))
                .collect(),
            force: r
                .iter()
                .zip(&mask)
                .map(|(k, m)| if *m { *k } else { 0.0 })
                .collect(),
            damping: model
                .mu_hat_field()
                .data()
                .iter()
                .map(|m| (-m * dt).exp())
                .collect(),
            modes2_hat: model.modes2().iter().map(Field::spectral).collect(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn half_linear(&self, x: &mut Field, y: &mut Field) {
        x.data_mut()
            .iter_mut()
            .zip(&self.half_s)
            .for_each(|(v, p)| *v *= p);
        y.data_mut()
            .iter_mut()
            .zip(&self.half_w)
            .for_each(|(v, p)| *v *= p);
    }

    /// Exact nonlinear substep; `x` physical, `y_phys` physical copy of the
    /// wave field, `y_hat` spectral wave field updated in place.
    fn nonlinear(
        &self,
        x: &mut Field,
        y_phys: &Field,
        y_hat: &mut Field,
        weight: Option<&[f64]>,
        extra_phase: Option<&Field>,
    ) {
        let dt = self.dt;
        match extra_phase {
            Some(e) => {
                for ((v, y), p) in x.data_mut().iter_mut().zip(y_phys.data()).zip(e.data()) {
                    *v *= Complex64::from_polar(1.0, -dt * (y.re + p.re));
                }
            }
            None => {
                for (v, y) in x.data_mut().iter_mut().zip(y_phys.data()) {
                    *v *= Complex64::from_polar(1.0, -dt * y.re);
                }
            }
        }
        let mut dens = Field::zeros(self.grid, Rep::Physical);
        match weight {
            Some(w) => dens
                .data_mut()
                .iter_mut()
                .zip(x.data())
                .zip(w)
                .for_each(|((d, v), w)| d.re = w * v.norm_sqr()),
            None => dens
                .data_mut()
                .iter_mut()
                .zip(x.data())
                .for_each(|(d, v)| d.re = v.norm_sqr()),
        }
        dens.set_rep(Rep::Spectral);
        for ((y, f), k) in y_hat
            .data_mut()
            .iter_mut()
            .zip(dens.data())
            .zip(&self.force)
        {
            *y += I * dt * k * f;
        }
    }

    /// One direct step on spectral `(x_hat, y_hat)` over mesh step `s`.
    pub fn direct_step(
        &self,
        x_hat: &mut Field,
        y_hat: &mut Field,
        model: &NoiseModel,
        path: &NoisePath,
        s: usize,
    ) {
        self.half_linear(x_hat, y_hat);
        let mut x = x_hat.physical();
        if self.coupling {
            let y = y_hat.physical();
            self.nonlinear(&mut x, &y, y_hat, None, None);
        }
        if !model.modes1().is_empty() {
            let dw = model.w1_increment(path, s);
            for ((v, w), e) in x.data_mut().iter_mut().zip(dw.data()).zip(&self.damping) {
                *v *= w.exp() * e;
            }
        }
        for (k, m) in self.modes2_hat.iter().enumerate() {
            let db = path.increment(2, k, s);
            y_hat
                .data_mut()
                .iter_mut()
                .zip(m.data())
                .for_each(|(y, p)| *y += p * db);
        }
        x.set_rep(Rep::Spectral);
        *x_hat = x;
        self.half_linear(x_hat, y_hat);
    }

    /// One rescaled step on spectral `(u_hat, v_hat)` given the noise data at both step ends.
    pub fn rescaled_step(&self, u_hat: &mut Field, v_hat: &mut Field, ends: &StepEnds) {
        self.half_linear(u_hat, v_hat);
        let mut u = u_hat.physical();
        if self.coupling {
            let v = v_hat.physical();
            self.nonlinear(
                &mut u,
                &v,
                v_hat,
                ends.weight.as_deref(),
                ends.conv_re.as_ref(),
            );
        }
        if let Some(co) = &ends.coeffs {
            u = rk4_lower_order(&u, co, self.dt);
        }
        u.set_rep(Rep::Spectral);
        *u_hat = u;
        self.half_linear(u_hat, v_hat);
    }
}

/// Noise-dependent data of one rescaled step, averaged over the step endpoints.
#[derive(Debug, Clone, Default)]
pub struct StepEnds {
    /// `|e^{G}|²` (absent when identically one).
    pub weight: Option<Vec<f64>>,
    /// `Re 𝒯(W₂)` (absent without wave noise).
    pub conv_re: Option<Field>,
    /// `(b, c)` (absent when identically zero).
    pub coeffs: Option<Coefficients>,
}

fn rk4_lower_order(u: &Field, co: &Coefficients, dt: f64) -> Field {
    let f = |w: &Field| co.apply(w).scale(I);
    let k1 = f(u);
    let k2 = f(&u.axpy(Complex64::new(0.5 * dt, 0.0), &k1).unwrap());
    let k3 = f(&u.axpy(Complex64::new(0.5 * dt, 0.0), &k2).unwrap());
    let k4 = f(&u.axpy(Complex64::new(dt, 0.0), &k3).unwrap());
    let mut out = u.clone();
    for i in 0..out.data().len() {
        let inc =
            (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]) * (dt / 6.0);
        out.data_mut()[i] += inc;
    }
    out
}

/// Noise data of the rescaled frame at successive mesh points.
pub struct RescaledDriver<'a> {
    model: &'a NoiseModel,
    path: &'a NoisePath,
    tracker: ConvolutionTracker,
    s: usize,
    gauge: Field,
    conv: Field,
    coeffs: Coefficients,
    trivial_weight: bool,
    trivial_coeffs: bool,
}

impl<'a> RescaledDriver<'a> {
    /// Driver positioned at mesh index `s0`.
    pub fn new(model: &'a NoiseModel, path: &'a NoisePath, s0: usize) -> Self {
        let grid = *model.grid();
        let mut tracker = ConvolutionTracker::new(grid, path.dt());
        for k in 0..s0 {
            tracker.advance(model, path, k);
        }
        let gauge = gauge_at_step(model, path, s0);
        // Spatially constant gauge ⇒ b = c = 0; real gauge only in the nonconservative frame.
        let g0 = model.modes1().iter().all(|f| {
            let v0 = f.data()[0];
            f.data().iter().all(|v| *v == v0)
        });
        let trivial_weight = model.is_conservative();
        Self {
            model,
            path,
            conv: tracker.value(),
            coeffs: Coefficients::from_w1(&gauge),
            tracker,
            s: s0,
            gauge,
            trivial_weight,
            trivial_coeffs: g0,
        }
    }

    pub fn step_index(&self) -> usize {
        self.s
    }

    pub fn gauge(&self) -> &Field {
        &self.gauge
    }

    pub fn convolution(&self) -> &Field {
        &self.conv
    }

    /// Advance to `s + 1` and return the averaged data for the step `s → s+1`.
    pub fn advance(&mut self) -> StepEnds {
        let s = self.s;
        self.tracker.advance(self.model, self.path, s);
        let gauge1 = gauge_at_step(self.model, self.path, s + 1);
        let conv1 = self.tracker.value();
        let coeffs1 = if self.trivial_coeffs {
            self.coeffs.clone()
        } else {
            Coefficients::from_w1(&gauge1)
        };
        let weight = (!self.trivial_weight).then(|| {
            gauge_weight(&self.gauge)
                .iter()
                .zip(gauge_weight(&gauge1))
                .map(|(a, b)| 0.5 * (a + b))
                .collect()
        });
        let conv_re =
            (!self.model.modes2().is_empty()).then(|| (&self.conv + &conv1).scale_re(0.5).re());
        let coeffs = (!self.trivial_coeffs).then(|| self.coeffs.lerp(&coeffs1, 0.5));
        self.gauge = gauge1;
        self.conv = conv1;
        self.coeffs = coeffs1;
        self.s = s + 1;
        StepEnds {
            weight,
            conv_re,
            coeffs,
        }
    }
}

/// One direct step of a state on the path mesh.
pub fn step_direct(
    state: &ZakharovState,
    model: &NoiseModel,
    path: &NoisePath,
    dt: f64,
) -> Result<ZakharovState> {
    state.expect_frame(Frame::Direct)?;
    if (dt - path.dt()).abs() > 1e-12 * dt {
        return Err(ZlabError::InvalidArgument(
            "dt differs from the path mesh".into(),
        ));
    }
    let s = path.step_of(state.t)?;
    if s >= path.steps() {
        return Err(ZlabError::BeyondHorizon {
            t: state.t + dt,
            horizon: path.horizon(),
        });
    }
    let stepper = Stepper::new(*state.grid(), dt, model)?;
    let mut x = state.x.spectral();
    let mut y = state.y.spectral();
    stepper.direct_step(&mut x, &mut y, model, path, s);
    finish(x, y, state.t + dt, Frame::Direct)
}

/// One rescaled step of a state on the path mesh.
pub fn step_rescaled(
    state: &ZakharovState,
    model: &NoiseModel,
    path: &NoisePath,
    dt: f64,
) -> Result<ZakharovState> {
    let frame = rescaled_frame_for(model);
    state.expect_frame(frame)?;
    let s = path.step_of(state.t)?;
    if s >= path.steps() {
        return Err(ZlabError::BeyondHorizon {
            t: state.t + dt,
            horizon: path.horizon(),
        });
    }
    let stepper = Stepper::new(*state.grid(), dt, model)?;
    let mut driver = RescaledDriver::new(model, path, s);
    let ends = driver.advance();
    let mut u = state.x.spectral();
    let mut v = state.y.spectral();
    stepper.rescaled_step(&mut u, &mut v, &ends);
    finish(u, v, state.t + dt, frame)
}

fn finish(x: Field, y: Field, t: f64, frame: Frame) -> Result<ZakharovState> {
    let out = ZakharovState::new(x.physical(), y.physical(), t, frame)?;
    if !out.is_finite() {
        return Err(ZlabError::NonFinite);
    }
    Ok(out)
}
