//! The Aubin–Talenti ground state, the Zakharov energy and related functionals.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Frame, ZakharovState};
use crate::error::Result;
use crate::noise::{NoiseKey, NoiseModel, NoisePath, Process};
use crate::norms::sweep::random_field;
use crate::quadrature::integrate_half_line;
use crate::spectral::{apply_radial, laplacian, Field, Grid};

/// Area of the unit sphere `S³`.
const SPHERE3: f64 = 2.0 * PI * PI;
const QUAD_TOL: f64 = 1e-12;

/// Zakharov energy `∫ ½|∇u|² + ¼|v|² + ½ Re(v)|u|²`.
pub fn energy(u: &Field, v: &Field) -> Result<f64> {
    u.check_grid(v)?;
    let up = u.physical();
    let vp = v.physical();
    let coupling: f64 = up
        .data()
        .iter()
        .zip(vp.data())
        .map(|(a, b)| b.re * a.norm_sqr())
        .sum::<f64>()
        * u.grid().cell_volume();
    Ok(0.5 * u.grad_norm_sq() + 0.25 * v.l2_norm_sq() + 0.5 * coupling)
}

/// `W_λ(x) = λ / (1 + λ²|x|²/8)`, solving `−ΔW = W³` in four dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub lambda: f64,
}

impl Default for GroundState {
    fn default() -> Self {
        Self { lambda: 1.0 }
    }
}

impl GroundState {
    pub fn new(lambda: f64) -> Self {
        Self { lambda }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let l = self.lambda;
        l / (1.0 + l * l * r * r / 8.0)
    }

    /// Paired wave component `−W_λ²`.
    pub fn wave(&self, r: f64) -> f64 {
        -self.eval(r).powi(2)
    }

    pub fn field(&self, grid: Grid) -> Field {
        Field::from_real_fn(grid, |x| self.eval(norm(x)))
    }

    pub fn wave_field(&self, grid: Grid) -> Field {
        Field::from_real_fn(grid, |x| self.wave(norm(x)))
    }

    /// Initial state `(a·W_λ, −a²·W_λ²)` on the grid.
    pub fn state(&self, grid: Grid, a: f64) -> Result<ZakharovState> {
        ZakharovState::new(
            self.field(grid).scale_re(a),
            self.wave_field(grid).scale_re(a * a),
            0.0,
            Frame::Direct,
        )
    }

    /// `W_λ'(r)` (closed form).
    pub fn deriv(&self, r: f64) -> f64 {
        let l = self.lambda;
        let q = 1.0 + l * l * r * r / 8.0;
        -l * l * l * r / (4.0 * q * q)
    }

    /// `e_Z(W_λ, −W_λ²)` as one radial integral of the energy density.
    pub fn energy_radial(&self) -> f64 {
        SPHERE3
            * integrate_half_line(
                |r| {
                    let w = self.eval(r);
                    let dw = self.deriv(r);
                    (0.5 * dw * dw + 0.25 * w.powi(4) - 0.5 * w.powi(4)) * r.powi(3)
                },
                QUAD_TOL,
            )
    }

    /// Relative `L²` residual of `ΔW + W³`, with the radial Laplacian
    /// `W'' + 3W'/r` taken by fourth-order central differences.
    pub fn radial_residual(&self) -> f64 {
        let h = 1e-3 / self.lambda;
        let lap = |r: f64| {
            let f = |s: f64| self.eval(s);
            let d2 = (-f(r + 2.0 * h) + 16.0 * f(r + h) - 30.0 * f(r) + 16.0 * f(r - h)
                - f(r - 2.0 * h))
                / (12.0 * h * h);
            let d1 =
                (-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h)) / (12.0 * h);
            if r < 1e-8 {
                4.0 * d2
            } else {
                d2 + 3.0 * d1 / r
            }
        };
        let num = integrate_half_line(
            |r| (lap(r) + self.eval(r).powi(3)).powi(2) * r.powi(3),
            1e-10,
        );
        let den = integrate_half_line(|r| self.eval(r).powi(6) * r.powi(3), 1e-10);
        (num / den).sqrt()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Radial-quadrature constants of the ground state (`λ = 1`, `d = 4`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundConstants {
    /// `‖W²‖²_{L²}`.
    pub w2_sq: f64,
    /// `‖∇W‖²_{L²}`.
    pub grad_sq: f64,
    /// `‖W³‖²_{L²}`.
    pub w3_sq: f64,
    /// `e_Z(W, −W²)` from the energy density.
    pub energy: f64,
    /// `¼‖W²‖²`.
    pub quarter_w2_sq: f64,
    /// Relative residual of `ΔW + W³`.
    pub radial_residual: f64,
}

impl GroundConstants {
    fn compute() -> Self {
        let gs = GroundState::new(1.0);
        let w2_sq = SPHERE3 * integrate_half_line(|r| gs.eval(r).powi(4) * r.powi(3), QUAD_TOL);
        let grad_sq = SPHERE3 * integrate_half_line(|r| gs.deriv(r).powi(2) * r.powi(3), QUAD_TOL);
        let w3_sq = SPHERE3 * integrate_half_line(|r| gs.eval(r).powi(6) * r.powi(3), QUAD_TOL);
        Self {
            w2_sq,
            grad_sq,
            w3_sq,
            energy: gs.energy_radial(),
            quarter_w2_sq: 0.25 * w2_sq,
            radial_residual: gs.radial_residual(),
        }
    }

    /// Cached constants.
    pub fn get() -> &'static GroundConstants {
        static C: OnceLock<GroundConstants> = OnceLock::new();
        C.get_or_init(Self::compute)
    }

    /// `‖W²‖_{L²}`.
    pub fn w2_norm(&self) -> f64 {
        self.w2_sq.sqrt()
    }

    /// Energy threshold `e_Z(W, −W²)`.
    pub fn threshold(&self) -> f64 {
        self.energy
    }
}

/// `‖ΔW_λ + W_λ³‖ / ‖W_λ³‖` for `W_λ` restricted to a four-dimensional grid.
pub fn ground_state_residual(lambda: f64, grid: Grid) -> Result<f64> {
    if grid.d() != 4 {
        return Err(crate::ZlabError::InvalidGrid(
            "ground state residual needs d = 4".into(),
        ));
    }
    let w = GroundState::new(lambda).field(grid);
    let cube = w.map(|v| v * v * v);
    let res = &laplacian(&w).physical() + &cube;
    Ok(res.l2_norm() / cube.l2_norm())
}

/// Smallest box length with `W_λ(L/2) ≤ frac · W_λ(0)`.
pub fn box_length_for_tail(lambda: f64, frac: f64) -> f64 {
    // 1/(1 + λ²L²/32) ≤ frac
    (32.0 * (1.0 / frac - 1.0)).sqrt() / lambda
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalReport {
    pub energy: f64,
    pub g_norm: f64,
    pub grad_sq: f64,
    pub hypotheses_met: bool,
    /// `‖g‖² ≤ 4e_Z` (only meaningful when the hypotheses hold).
    pub wave_bound_holds: bool,
    /// `‖∇f‖² ≤ ½·‖W²‖/(‖W²‖−‖g‖)·(4e_Z−‖g‖²) ≤ ‖W²‖²`.
    pub gradient_bound_holds: bool,
    /// Middle term of the gradient bound.
    pub gradient_bound: f64,
}

impl VariationalReport {
    pub fn violated(&self) -> bool {
        self.hypotheses_met && !(self.wave_bound_holds && self.gradient_bound_holds)
    }
}

/// Check the variational constraints below the ground state for `(f, g)`.
pub fn variational_check(f: &Field, g: &Field, slack: f64) -> Result<VariationalReport> {
    let c = GroundConstants::get();
    let a = c.w2_norm();
    let e = energy(f, g)?;
    let gn = g.l2_norm();
    let grad_sq = f.grad_norm_sq();
    let hypotheses_met = e < 0.25 * c.w2_sq && gn <= a;
    let bound = if gn < a {
        0.5 * a / (a - gn) * (4.0 * e - gn * gn)
    } else {
        f64::INFINITY
    };
    Ok(VariationalReport {
        energy: e,
        g_norm: gn,
        grad_sq,
        hypotheses_met,
        wave_bound_holds: gn * gn <= 4.0 * e + slack,
        gradient_bound_holds: grad_sq <= bound + slack && bound <= c.w2_sq + slack,
        gradient_bound: bound,
    })
}

/// Random pair in the hypothesis region `e_Z < ¼‖W²‖²`, `‖g‖ < ‖W²‖`, by
/// rejection. `f` is a mean-free field band-limited at `cutoff` with
/// `‖∇f‖² ≤ 1.5‖W²‖²`; `g = −a|f|²/‖f²‖ + b·η/‖η‖` mixes the focusing profile
/// with independent real noise, `a, b ≤ ‖W²‖`. Returns the pair and the
/// number of draws it took.
pub fn sample_subthreshold_pair(
    grid: Grid,
    key: NoiseKey,
    cutoff: f64,
) -> Result<(Field, Field, usize)> {
    const MAX_DRAWS: usize = 10_000;
    let c = GroundConstants::get();
    let a = c.w2_norm();
    let mean_free = |f: Field| {
        apply_radial(&f, |r| {
            Complex64::new(if r == 0.0 { 0.0 } else { 1.0 }, 0.0)
        })
        .physical()
    };
    for draw in 0..MAX_DRAWS {
        let tag = 4 * draw as u32;
        let mut u = key.stream(Process::Aux, tag + 3, 0);
        let (s_f, s_a, s_b) = (u.next_uniform(), u.next_uniform(), u.next_uniform());
        let f = mean_free(random_field(grid, key, tag, cutoff));
        let gn = f.grad_norm_sq();
        if gn == 0.0 {
            continue;
        }
        let f = f.scale_re((1.5 * s_f * c.w2_sq / gn).sqrt());
        let focus = f.abs_sq();
        let eta =
            mean_free(random_field(grid, key, tag + 1, cutoff)).map(|v| Complex64::new(v.re, 0.0));
        let g = focus
            .scale_re(-s_a * a / focus.l2_norm().max(f64::MIN_POSITIVE))
            .axpy(
                Complex64::new(s_b * a / eta.l2_norm().max(f64::MIN_POSITIVE), 0.0),
                &eta,
            )?
            .physical();
        if energy(&f, &g)? < 0.25 * c.w2_sq && g.l2_norm() < a {
            return Ok((f, g, draw + 1));
        }
    }
    Err(crate::ZlabError::InvalidArgument(format!(
        "no sub-threshold pair in {MAX_DRAWS} draws"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaStar {
    pub value: f64,
    pub threshold: f64,
    pub crossed: bool,
}

/// `e_Z(e^{−W₁(t)}X(t), Y(t) − 𝒯_t(W₂))` compared with `e_Z(W, −W²) − 1/n`.
pub fn sigma_star_functional(
    state: &ZakharovState,
    model: &NoiseModel,
    path: &NoisePath,
    n: u32,
) -> Result<SigmaStar> {
    state.expect_frame(Frame::Direct)?;
    let w1 = model.w1_field(path, state.t)?;
    let u = w1.zip_map(&state.x, |w, x| (-w).exp() * x)?;
    let v = &state.y.physical() - &model.stochastic_convolution(path, state.t)?;
    let value = energy(&u, &v)?;
    let threshold = GroundConstants::get().threshold() - 1.0 / n.max(1) as f64;
    Ok(SigmaStar {
        value,
        threshold,
        crossed: value > threshold,
    })
}

/// First stored checkpoint at which the stopping functional exceeds its threshold.
pub fn sigma_star_crossing(
    states: &[ZakharovState],
    model: &NoiseModel,
    path: &NoisePath,
    n: u32,
) -> Result<Option<f64>> {
    for s in states {
        if sigma_star_functional(s, model, path, n)?.crossed {
            return Ok(Some(s.t));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_closed_forms() {
        let c = GroundConstants::get();
        assert!((c.w2_sq - 32.0 * PI * PI / 3.0).abs() < 1e-9 * c.w2_sq);
        assert!((c.energy - c.quarter_w2_sq).abs() < 1e-8 * c.energy);
        assert!((c.grad_sq - c.w2_sq).abs() < 1e-8 * c.w2_sq);
        assert!(c.radial_residual < 1e-8);
    }

    #[test]
    fn energy_of_zero() {
        let g = Grid::new(2, 8, 4.0).unwrap();
        let z = Field::zeros(g, crate::spectral::Rep::Physical);
        assert_eq!(energy(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn g_zero_variational_case() {
        let g = Grid::new(2, 16, 8.0).unwrap();
        let f = Field::from_real_fn(g, |x| 0.3 * (-(x[0] * x[0] + x[1] * x[1])).exp());
        let z = Field::zeros(g, crate::spectral::Rep::Physical);
        let r = variational_check(&f, &z, 1e-12).unwrap();
        assert!(r.hypotheses_met && !r.violated());
    }
}
