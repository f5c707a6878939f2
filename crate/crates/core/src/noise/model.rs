use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::NoisePath;
use crate::error::{Result, ZlabError};
use crate::spectral::{self, Field, Grid, Rep};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Named noise configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoisePreset {
    /// No noise: deterministic dynamics.
    None,
    /// Real modes `φ_k^{(1)} = a·2^{−k}·G_k` (periodised Gaussians), so the
    /// Schrödinger mass is conserved pathwise, plus real wave modes.
    Conservative {
        #[serde(default = "defaults::modes")]
        modes: usize,
        #[serde(default = "defaults::amplitude")]
        amplitude: f64,
        #[serde(default = "defaults::width")]
        width: f64,
        #[serde(default = "defaults::wave_modes")]
        wave_modes: usize,
        #[serde(default = "defaults::amplitude")]
        wave_amplitude: f64,
    },
    /// A single constant mode `φ^{(1)} = i·c`, no wave noise.
    Nonconservative { c: f64 },
}

mod defaults {
    pub fn modes() -> usize {
        3
    }
    pub fn wave_modes() -> usize {
        2
    }
    pub fn amplitude() -> f64 {
        0.5
    }
    pub fn width() -> f64 {
        1.0
    }
}

/// Summability sums of the noise coefficients, evaluated on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// `Σ_k ‖φ_k^{(1)}‖²_{H⁴}`.
    pub h4_sum: f64,
    /// `Σ_j Σ_k Σ_r sup_y |∇φ_k^{(1)}(r e_j + y)| dx` (axis-sum surrogate of the lateral condition).
    pub lateral_sum: f64,
    /// `Σ_k ‖φ_k^{(2)}‖²_{H²}`.
    pub h2_sum: f64,
}

impl HypothesisReport {
    pub fn is_finite(&self) -> bool {
        self.h4_sum.is_finite() && self.lateral_sum.is_finite() && self.h2_sum.is_finite()
    }
}

/// `W₁ = Σ_k i φ_k^{(1)} β_k^{(1)}` and `W₂ = Σ_k i φ_k^{(2)} β_k^{(2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    grid: Grid,
    modes1: Vec<Field>,
    modes2: Vec<Field>,
}

/// Periodised Gaussian `Σ_m exp(−|x − x₀ + mL|²/(2w²))` over the nearest images.
pub fn periodized_gaussian(grid: Grid, center: &[f64], width: f64) -> Field {
    let l = grid.length();
    let d = grid.d();
    let images = 3usize.pow(d as u32);
    Field::from_real_fn(grid, |x| {
        let mut acc = 0.0;
        for img in 0..images {
            let mut r2 = 0.0;
            let mut code = img;
            for a in 0..d {
                let shift = (code % 3) as f64 - 1.0;
                code /= 3;
                let y = x[a] - center[a] + shift * l;
                r2 += y * y;
            }
            acc += (-r2 / (2.0 * width * width)).exp();
        }
        acc
    })
}

impl NoiseModel {
    pub fn build(grid: Grid, preset: &NoisePreset) -> Result<Self> {
        match *preset {
            NoisePreset::None => Ok(Self {
                grid,
                modes1: Vec::new(),
                modes2: Vec::new(),
            }),
            NoisePreset::Nonconservative { c } => {
                if !c.is_finite() || c < 0.0 {
                    return Err(ZlabError::InvalidNoise(format!("c = {c} must be ≥ 0")));
                }
                Ok(Self {
                    grid,
                    modes1: vec![Field::constant(grid, Complex64::new(0.0, c))],
                    modes2: Vec::new(),
                })
            }
            NoisePreset::Conservative {
                modes,
                amplitude,
                width,
                wave_modes,
                wave_amplitude,
            } => {
                if !(width > 0.0 && amplitude.is_finite() && wave_amplitude.is_finite()) {
                    return Err(ZlabError::InvalidNoise(
                        "bad conservative parameters".into(),
                    ));
                }
                let l = grid.length();
                let d = grid.d();
                let bump = |k: usize, count: usize, a: f64, phase: f64| {
                    let mut center = vec![0.0; d];
                    center[0] = (k as f64 + phase) * l / (2.0 * count.max(1) as f64) - 0.25 * l;
                    periodized_gaussian(grid, &center, width).scale_re(a * 0.5f64.powi(k as i32))
                };
                let modes1 = (0..modes).map(|k| bump(k, modes, amplitude, 0.0)).collect();
                let modes2 = (0..wave_modes)
                    .map(|k| bump(k, wave_modes, wave_amplitude, 0.5))
                    .collect();
                Ok(Self {
                    grid,
                    modes1,
                    modes2,
                })
            }
        }
    }

    /// Arbitrary coefficient families; wave modes must be real-valued.
    pub fn custom(grid: Grid, modes1: Vec<Field>, modes2: Vec<Field>) -> Result<Self> {
        for f in modes1.iter().chain(&modes2) {
            if *f.grid() != grid {
                return Err(ZlabError::GridMismatch);
            }
            if !f.is_finite() {
                return Err(ZlabError::InvalidNoise("non-finite mode".into()));
            }
        }
        let modes1: Vec<Field> = modes1.iter().map(Field::physical).collect();
        let modes2: Vec<Field> = modes2.iter().map(Field::physical).collect();
        for f in &modes2 {
            let scale = f.max_abs().max(1.0);
            if f.data().iter().any(|v| v.im.abs() > 1e-14 * scale) {
                return Err(ZlabError::InvalidNoise(
                    "wave noise modes must be real".into(),
                ));
            }
        }
        Ok(Self {
            grid,
            modes1,
            modes2,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn modes1(&self) -> &[Field] {
        &self.modes1
    }

    pub fn modes2(&self) -> &[Field] {
        &self.modes2
    }

    pub fn is_empty(&self) -> bool {
        self.modes1.is_empty() && self.modes2.is_empty()
    }

    /// `μ = ½ Σ_k |φ_k^{(1)}|²`.
    pub fn mu(&self) -> Field {
        let mut out = Field::zeros(self.grid, Rep::Physical);
        for f in &self.modes1 {
            for (o, v) in out.data_mut().iter_mut().zip(f.data()) {
                o.re += 0.5 * v.norm_sqr();
            }
        }
        out
    }

    /// `μ̂ = ½ Σ_k (|φ_k|² − φ_k²)` pointwise; zero for real modes.
    pub fn mu_hat_field(&self) -> Field {
        let mut out = Field::zeros(self.grid, Rep::Physical);
        for f in &self.modes1 {
            for (o, v) in out.data_mut().iter_mut().zip(f.data()) {
                *o += 0.5 * (v.norm_sqr() - v * v);
            }
        }
        out
    }

    /// `μ̂` when `W₁` has a single spatially constant mode.
    pub fn mu_hat(&self) -> Option<Complex64> {
        if self.modes1.len() != 1 {
            return None;
        }
        let f = &self.modes1[0];
        let v0 = f.data()[0];
        if f.data()
            .iter()
            .any(|v| (v - v0).norm() > 1e-14 * v0.norm().max(1.0))
        {
            return None;
        }
        Some(0.5 * (v0.norm_sqr() - v0 * v0))
    }

    /// Whether every Schrödinger mode is real, so `|e^{W₁}| = 1`.
    pub fn is_conservative(&self) -> bool {
        self.modes1
            .iter()
            .all(|f| f.data().iter().all(|v| v.im == 0.0))
    }

    pub fn hypothesis_report(&self) -> HypothesisReport {
        let h4_sum = self
            .modes1
            .iter()
            .map(|f| f.weighted_spectral_sq(|k2| (1.0 + k2).powi(4)))
            .sum();
        let h2_sum = self
            .modes2
            .iter()
            .map(|f| f.weighted_spectral_sq(|k2| (1.0 + k2).powi(2)))
            .sum();
        let g = self.grid;
        let d = g.d();
        let n = g.n();
        let mut lateral_sum = 0.0;
        let mut idx = [0usize; 4];
        for f in &self.modes1 {
            let grad = spectral::gradient(f);
            let mag: Vec<f64> = (0..g.len())
                .map(|i| {
                    grad.iter()
                        .map(|c| c.data()[i].norm_sqr())
                        .sum::<f64>()
                        .sqrt()
                })
                .collect();
            for j in 0..d {
                let mut sup = vec![0.0f64; n];
                for (flat, m) in mag.iter().enumerate() {
                    g.unravel(flat, &mut idx[..d]);
                    sup[idx[j]] = sup[idx[j]].max(*m);
                }
                lateral_sum += sup.iter().sum::<f64>() * g.dx();
            }
        }
        HypothesisReport {
            h4_sum,
            lateral_sum,
            h2_sum,
        }
    }

    fn combine(&self, modes: &[Field], coeff: impl Fn(usize) -> f64) -> Field {
        let mut out = Field::zeros(self.grid, Rep::Physical);
        for (k, f) in modes.iter().enumerate() {
            let a = I * coeff(k);
            for (o, v) in out.data_mut().iter_mut().zip(f.data()) {
                *o += a * v;
            }
        }
        out
    }

    fn check_path(&self, path: &NoisePath) -> Result<()> {
        if path.modes(0) < self.modes1.len() || path.modes(1) < self.modes2.len() {
            return Err(ZlabError::InvalidNoise(format!(
                "path carries {}+{} modes, model needs {}+{}",
                path.modes(0),
                path.modes(1),
                self.modes1.len(),
                self.modes2.len()
            )));
        }
        Ok(())
    }

    /// `W₁` at mesh index `s`.
    pub fn w1_at_step(&self, path: &NoisePath, s: usize) -> Field {
        self.combine(&self.modes1, |k| path.beta_at(1, k, s))
    }

    /// `W₁(t, ·)`.
    pub fn w1_field(&self, path: &NoisePath, t: f64) -> Result<Field> {
        self.check_path(path)?;
        Ok(self.w1_at_step(path, path.step_of(t)?))
    }

    /// `W₂(t, ·)`.
    pub fn w2_field(&self, path: &NoisePath, t: f64) -> Result<Field> {
        self.check_path(path)?;
        let s = path.step_of(t)?;
        Ok(self.combine(&self.modes2, |k| path.beta_at(2, k, s)))
    }

    /// `ΔW₁` over step `s`.
    pub fn w1_increment(&self, path: &NoisePath, s: usize) -> Field {
        self.combine(&self.modes1, |k| path.increment(1, k, s))
    }

    /// `ΔW₂` over step `s`.
    pub fn w2_increment(&self, path: &NoisePath, s: usize) -> Field {
        self.combine(&self.modes2, |k| path.increment(2, k, s))
    }

    /// Stochastic convolution `𝒯_t(W₂) = −i∫₀^t e^{i(t−s)|∇|} dW₂(s)` by the left-point rule.
    pub fn stochastic_convolution(&self, path: &NoisePath, t: f64) -> Result<Field> {
        self.check_path(path)?;
        let s = path.step_of(t)?;
        let mut tr = ConvolutionTracker::new(self.grid, path.dt());
        for k in 0..s {
            tr.advance(self, path, k);
        }
        Ok(tr.value())
    }

    /// `(b, c) = (2∇W₁, ∇W₁·∇W₁ + ΔW₁)` at time `t`.
    pub fn lower_order_coeffs(&self, path: &NoisePath, t: f64) -> Result<Coefficients> {
        Ok(Coefficients::from_w1(&self.w1_field(path, t)?))
    }
}

/// Lower-order coefficients of the rescaled Schrödinger equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    /// `b = 2∇W₁`, one field per axis.
    pub b: Vec<Field>,
    /// `c = ∇W₁·∇W₁ + ΔW₁` (complex square, no conjugation).
    pub c: Field,
}

impl Coefficients {
    pub fn from_w1(w1: &Field) -> Self {
        let grad: Vec<Field> = spectral::gradient(w1).iter().map(Field::physical).collect();
        let mut c = spectral::laplacian(w1).physical();
        for g in &grad {
            for (o, v) in c.data_mut().iter_mut().zip(g.data()) {
                *o += v * v;
            }
        }
        let b = grad.iter().map(|g| g.scale_re(2.0)).collect();
        Self { b, c }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            b: (0..grid.d())
                .map(|_| Field::zeros(grid, Rep::Physical))
                .collect(),
            c: Field::zeros(grid, Rep::Physical),
        }
    }

    /// `b·∇u + c·u`.
    pub fn apply(&self, u: &Field) -> Field {
        let mut out = u.physical();
        for (o, c) in out.data_mut().iter_mut().zip(self.c.data()) {
            *o *= c;
        }
        for (a, b) in self.b.iter().enumerate() {
            let du = spectral::partial(u, a).physical();
            for ((o, bv), dv) in out.data_mut().iter_mut().zip(b.data()).zip(du.data()) {
                *o += bv * dv;
            }
        }
        out
    }

    /// `(1−θ)·self + θ·other`.
    pub fn lerp(&self, other: &Coefficients, theta: f64) -> Coefficients {
        let mix = |a: &Field, b: &Field| {
            a.scale_re(1.0 - theta)
                .axpy(Complex64::new(theta, 0.0), b)
                .expect("same grid")
        };
        Coefficients {
            b: self
                .b
                .iter()
                .zip(&other.b)
                .map(|(x, y)| mix(x, y))
                .collect(),
            c: mix(&self.c, &other.c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c
            .data()
            .iter()
            .chain(self.b.iter().flat_map(|b| b.data()))
            .all(|v| *v == Complex64::default())
    }
}

/// Incremental evaluation of `𝒯_{s·dt}(W₂)`:
/// `𝒯_{s+1} = e^{i dt|∇|}(𝒯_s − iΔW₂(s))`.
#[derive(Debug, Clone)]
pub struct ConvolutionTracker {
    value: Field,
    prop: Vec<Complex64>,
}

impl ConvolutionTracker {
    pub fn new(grid: Grid, dt: f64) -> Self {
        let prop = grid
            .xi_norm_table()
            .iter()
            .map(|r| Complex64::from_polar(1.0, dt * r))
            .collect();
        Self {
            value: Field::zeros(grid, Rep::Spectral),
            prop,
        }
    }

    pub fn advance(&mut self, model: &NoiseModel, path: &NoisePath, s: usize) {
        if !model.modes2.is_empty() {
            let inc = model.w2_increment(path, s).scale(-I).spectral();
            for (v, d) in self.value.data_mut().iter_mut().zip(inc.data()) {
                *v += d;
            }
        }
        for (v, p) in self.value.data_mut().iter_mut().zip(&self.prop) {
            *v *= p;
        }
    }

    pub fn value(&self) -> Field {
        self.value.physical()
    }

    pub fn value_spectral(&self) -> &Field {
        &self.value
    }
}

/// Geometric Brownian motion `h_c(t) = exp(−2cβ(t) − 2c²t)` driven by `β_1^{(1)}`.
pub fn geometric_bm(path: &NoisePath, c: f64, t: f64) -> Result<f64> {
    let beta = if c == 0.0 {
        0.0
    } else {
        path.brownian_value(1, 0, t)?
    };
    path.step_of(t)?;
    Ok((-2.0 * c * beta - 2.0 * c * c * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseKey;

    #[test]
    fn nonconservative_constants() {
        let g = Grid::new(2, 8, 4.0).unwrap();
        let m = NoiseModel::build(g, &NoisePreset::Nonconservative { c: 1.0 }).unwrap();
        assert!((m.mu_hat().unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(m.mu().data().iter().all(|v| (v.re - 0.5).abs() < 1e-15));
        assert!(m.modes2().is_empty());
    }

    #[test]
    fn empty_model_is_deterministic() {
        let g = Grid::new(2, 8, 4.0).unwrap();
        let m = NoiseModel::build(g, &NoisePreset::None).unwrap();
        assert!(m.mu().l2_norm() == 0.0);
        let p = NoisePath::generate(NoiseKey::new(0, 0), 0.1, 10, 0, 0).unwrap();
        assert_eq!(m.w1_field(&p, 0.5).unwrap().l2_norm(), 0.0);
        assert_eq!(m.stochastic_convolution(&p, 1.0).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn conservative_w1_is_imaginary() {
        let g = Grid::new(2, 16, 8.0).unwrap();
        let m = NoiseModel::build(
            g,
            &NoisePreset::Conservative {
                modes: 3,
                amplitude: 0.5,
                width: 1.0,
                wave_modes: 2,
                wave_amplitude: 0.5,
            },
        )
        .unwrap();
        assert!(m.is_conservative());
        let p = NoisePath::generate(NoiseKey::new(5, 0), 0.01, 20, 3, 2).unwrap();
        let w = m.w1_field(&p, 0.1).unwrap();
        assert!(w.data().iter().all(|v| v.re == 0.0));
        assert!(m.hypothesis_report().is_finite());
        assert!(m.mu_hat_field().max_abs() == 0.0);
    }

    #[test]
    fn custom_rejects_complex_wave_modes() {
        let g = Grid::new(1, 8, 4.0).unwrap();
        let bad = Field::constant(g, Complex64::new(0.0, 1.0));
        assert!(NoiseModel::custom(g, vec![], vec![bad]).is_err());
    }

    #[test]
    fn constant_mode_has_no_coefficients() {
        let g = Grid::new(2, 8, 4.0).unwrap();
        let m = NoiseModel::build(g, &NoisePreset::Nonconservative { c: 2.0 }).unwrap();
        let p = NoisePath::generate(NoiseKey::new(5, 0), 0.01, 20, 1, 0).unwrap();
        let co = m.lower_order_coeffs(&p, 0.2).unwrap();
        assert!(co.c.max_abs() < 1e-12);
        assert!(co.b.iter().all(|b| b.max_abs() < 1e-12));
    }

    #[test]
    fn gbm_at_zero() {
        let p = NoisePath::generate(NoiseKey::new(5, 0), 0.01, 20, 1, 0).unwrap();
        assert_eq!(geometric_bm(&p, 0.7, 0.0).unwrap(), 1.0);
        assert_eq!(geometric_bm(&p, 0.0, 0.2).unwrap(), 1.0);
    }
}
