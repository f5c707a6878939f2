//! Empirical constants for the linear, bilinear and trilinear estimates
//! that the adapted norms are built to satisfy.
//!
//! Every estimate is sampled on randomized band-limited inputs and reported
//! as the max and median of `left / right` over the sample. Nothing here
//! proves a bound; the tables show whether observed ratios stay bounded as
//! frequencies, windows and samples vary.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::adapted::{
    d_norm, n_total, s_norm, s_total, wave_norm, wave_total, x_norm_band, y_total, NormOptions,
    Regime,
};
use super::lateral::lateral_norm;
use crate::error::{Result, ZlabError};
use crate::ground_state::GroundConstants;
use crate::noise::{NoiseKey, NoisePath, Process};
use crate::spectral::{
    abs_grad, apply_radial, chi_low, lateral_project, schrodinger_propagate, wave_propagate,
    DyadicLadder, Field, Grid, Rep, SpaceTimeBlock,
};
use crate::variation::{besov_time_norm, l6_norm, median, BesovOptions, SampledPath};

/// Gaussian random field with spectrum cut off smoothly at `|ξ| ≈ cutoff`,
/// normalised in `L²`. `tag` separates independent draws under one key.
pub fn random_field(grid: Grid, key: NoiseKey, tag: u32, cutoff: f64) -> Field {
    let mut s = key.stream(Process::Aux, tag, 0);
    let xi = grid.xi_norm_table();
    let data: Vec<Complex64> = xi
        .iter()
        .map(|&r| {
            let (a, b) = (s.next_normal(), s.next_normal());
            Complex64::new(a, b) * chi_low(cutoff, r)
        })
        .collect();
    let f = Field::from_vec(grid, data, Rep::Spectral)
        .expect("length matches grid")
        .physical();
    let n = f.l2_norm();
    if n > 0.0 {
        f.scale_re(1.0 / n)
    } else {
        f
    }
}

/// Random field localised to the band `P_λ`, normalised in `L²`.
pub fn random_band_field(grid: Grid, key: NoiseKey, tag: u32, lambda: f64) -> Result<Field> {
    let ladder = DyadicLadder::for_grid(&grid);
    ladder.check_band(lambda)?;
    let f = random_field(grid, key, tag, 2.0 * ladder.top());
    let p = apply_radial(&f, |r| Complex64::new(ladder.band(lambda, r), 0.0)).physical();
    let n = p.l2_norm();
    Ok(if n > 0.0 { p.scale_re(1.0 / n) } else { p })
}

/// `P_λ` applied to a unit point mass at a random grid point, normalised in
/// `L²`: the most concentrated datum the band admits.
pub fn band_packet(grid: Grid, key: NoiseKey, tag: u32, lambda: f64) -> Result<Field> {
    let ladder = DyadicLadder::for_grid(&grid);
    ladder.check_band(lambda)?;
    let mut s = key.stream(Process::Aux, tag, 0);
    let n = grid.n();
    let idx: usize = (0..grid.d())
        .map(|a| ((s.next_uniform() * n as f64) as usize).min(n - 1) * grid.stride(a))
        .sum();
    let mut delta = Field::zeros(grid, Rep::Physical);
    delta.data_mut()[idx] = Complex64::new(1.0, 0.0);
    let p = apply_radial(&delta, |r| Complex64::new(ladder.band(lambda, r), 0.0)).physical();
    let norm = p.l2_norm();
    Ok(if norm > 0.0 {
        p.scale_re(1.0 / norm)
    } else {
        p
    })
}

/// `𝒥₀[F](t) = −i ∫_{t₀}^t e^{i(t−s)|∇|} F(s) ds` by the trapezoid rule on the block mesh.
pub fn wave_duhamel(f: &SpaceTimeBlock) -> Result<SpaceTimeBlock> {
    let dt = f.dt();
    let mut out = Vec::with_capacity(f.len());
    let mut acc = Field::zeros(*f.grid(), Rep::Physical);
    let mut prev = f.snapshot(0);
    out.push(acc.clone());
    for k in 1..f.len() {
        let cur = f.snapshot(k);
        let carried = wave_propagate(&acc.axpy(Complex64::new(0.0, -0.5 * dt), &prev)?, dt);
        acc = carried
            .axpy(Complex64::new(0.0, -0.5 * dt), &cur)?
            .physical();
        out.push(acc.clone());
        prev = cur;
    }
    SpaceTimeBlock::from_snapshots(f.t0(), dt, &out)
}

/// `‖f‖_{H^s}` via the spectral weight `(1 + |ξ|²)^s`.
fn hs_norm(f: &Field, s: f64) -> f64 {
    f.weighted_spectral_sq(|k2| (1.0 + k2).powf(s)).sqrt()
}

/// Solve `i∂_t u + Δu − Re(v_L) u = 0`, `v_L = e^{it|∇|}v₀`, by Strang splitting
/// with one substep per block sample.
pub fn schrodinger_with_potential(
    u0: &Field,
    v0: &Field,
    dt: f64,
    m: usize,
) -> Result<SpaceTimeBlock> {
    let mut u = u0.physical();
    let mut snaps = vec![u.clone()];
    for k in 1..m {
        let t_mid = (k as f64 - 0.5) * dt;
        let half = schrodinger_propagate(&u, 0.5 * dt).physical();
        let v = wave_propagate(v0, t_mid).physical();
        let kicked = half.zip_map(&v, |a, b| a * Complex64::from_polar(1.0, -dt * b.re))?;
        u = schrodinger_propagate(&kicked, 0.5 * dt).physical();
        snaps.push(u.clone());
    }
    SpaceTimeBlock::from_snapshots(0.0, dt, &snaps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimate {
    /// `‖e^{itΔ}f_λ‖_{S^{s,a}_λ} / (λ^s ‖f_λ‖)` per band.
    LinearSchrodinger { regime: Regime },
    /// `‖e^{itΔ}f_λ‖_{𝕏^s_λ} / (λ^s ‖f_λ‖)` per band.
    LinearX { regime: Regime },
    /// `‖e^{it|∇|}g_λ‖_{W^{0,α,β}_λ} / ‖g_λ‖` per band, and the assembled `𝕐` ratio.
    LinearWave { regime: Regime },
    /// `μ^{½}‖e^{itΔ}P_{μ,e}f‖_{L^{∞,2}_e} / ‖f‖` per band `μ > 1`.
    LocalSmoothing { axis: usize },
    /// `‖Re(v)u‖_{N^{1,¼}} / (‖v‖_𝕐 ‖u‖_{S^{1,¼}})`.
    BilinearEnergy,
    /// `‖Re(v)u‖_{N^{½,0}} / (‖v‖_{W^{0,0,0}} ‖u‖_D^{½} ‖u‖_{S^{½,0}}^{½})`.
    BilinearEndpoint,
    /// `‖𝒥₀[|∇|(uw)]‖_{W^{0,0,0}} / ((‖u‖_D‖w‖_D)^{½}(‖u‖_{S^{½,0}}‖w‖_{S^{½,0}})^{½})`.
    WaveBilinearEndpoint,
    /// `‖𝒥₀[|∇|(φ̄ψ)]‖_𝕐 / (‖φ‖_{S^{1,¼}}‖ψ‖_{S^{1,¼}})`.
    WaveBilinearEnergy,
    /// `‖𝒥₀(h|∇|(φ̄ψ))‖_𝕐 / ((‖h‖_{L⁶}+‖h‖_{B^{1/8}_{6,∞}})‖φ‖_{S^{1,¼}}‖ψ‖_{S^{1,¼}})`
    /// with `h = h_c` on the block window, or `h ≡ 1` when `c` is absent.
    Trilinear { c: Option<f64> },
    /// `‖u‖_{S^{½,0}} / ‖u₀‖_{H^{½}}` for the linear flow with a random free-wave
    /// potential of size `bound_frac·‖W²‖`; rows for growing sample prefixes.
    Uniform { bound_frac: f64 },
    /// `‖u‖_D / ‖u‖_{S^{½,0}}` and `‖u‖_{S^{½,0}} / ‖u‖_{S^{1,¼}}` on free flows of
    /// random band-limited data; rows `norm_chain_c1` and `norm_chain_c2`.
    NormChain,
    /// `max_λ ‖e^{itΔ}u₀‖_{D(I)} / ‖u₀‖_{H¹}` over point-concentrated band
    /// packets, per window length `|I|`, with a fitted log-log slope. The
    /// quarter-power law only shows between `|I| ≈ Λ⁻²` (top band) and the
    /// time the packets wrap around the box.
    ProfileScaling { windows: Vec<f64> },
}

impl Estimate {
    pub fn name(&self) -> String {
        match self {
            Estimate::LinearSchrodinger { regime } => {
                format!("linear_schrodinger_{regime:?}").to_lowercase()
            }
            Estimate::LinearX { regime } => format!("linear_x_{regime:?}").to_lowercase(),
            Estimate::LinearWave { regime } => format!("linear_wave_{regime:?}").to_lowercase(),
            Estimate::LocalSmoothing { axis } => format!("local_smoothing_e{axis}"),
            Estimate::BilinearEnergy => "bilinear_energy".into(),
            Estimate::BilinearEndpoint => "bilinear_endpoint".into(),
            Estimate::WaveBilinearEndpoint => "wave_bilinear_endpoint".into(),
            Estimate::WaveBilinearEnergy => "wave_bilinear_energy".into(),
            Estimate::Trilinear { c: Some(c) } => format!("trilinear_c{c}"),
            Estimate::Trilinear { c: None } => "trilinear_h1".into(),
            Estimate::NormChain => "norm_chain".into(),
            Estimate::Uniform { .. } => "uniform".into(),
            Estimate::ProfileScaling { .. } => "profile_scaling".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub grid: Grid,
    /// Block time step and sample count.
    pub dt: f64,
    pub m: usize,
    /// Random inputs per estimate (and per band for banded estimates).
    pub samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub options: NormOptions,
    pub estimates: Vec<Estimate>,
}

/// One table row. `param` is the band `λ` for banded estimates, the window
/// length for profile scaling, the prefix size for the uniform sweep, and
/// absent for whole-sample rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub estimate: String,
    pub param: Option<f64>,
    pub samples: usize,
    pub max: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<ConstantRow>,
    /// Log-log slopes of fitted scaling studies, by estimate name.
    pub slopes: Vec<(String, f64)>,
}

impl SweepTable {
    pub fn rows_for(&self, name: &str) -> Vec<&ConstantRow> {
        self.rows.iter().filter(|r| r.estimate == name).collect()
    }

    pub fn slope(&self, name: &str) -> Option<f64> {
        self.slopes.iter().find(|(n, _)| n == name).map(|(_, s)| *s)
    }
}

fn row(name: &str, param: Option<f64>, ratios: &[f64]) -> ConstantRow {
    ConstantRow {
        estimate: name.to_string(),
        param,
        samples: ratios.len(),
        max: ratios.iter().copied().fold(0.0, f64::max),
        median: if ratios.is_empty() {
            0.0
        } else {
            median(ratios)
        },
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

struct Ctx<'a> {
    spec: &'a SweepSpec,
    o: NormOptions,
}

impl Ctx<'_> {
    fn key(&self, sample: usize) -> NoiseKey {
        NoiseKey::new(self.spec.seed, sample as u64)
    }

    fn cutoff(&self) -> f64 {
        // inputs spread over the resolved range but stay off the grid corner
        0.5 * self.spec.grid.nyquist()
    }

    fn free(&self, f: &Field) -> Result<SpaceTimeBlock> {
        SpaceTimeBlock::free_schrodinger(f, 0.0, self.spec.dt, self.spec.m)
    }

    fn free_wave(&self, g: &Field) -> Result<SpaceTimeBlock> {
        SpaceTimeBlock::free_wave(g, 0.0, self.spec.dt, self.spec.m)
    }

    fn samples<T: Send>(&self, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
        (0..self.spec.samples).into_par_iter().map(f).collect()
    }

    fn lambdas(&self) -> Vec<f64> {
        DyadicLadder::with_k(&self.spec.grid, self.o.k).lambdas()
    }

    fn banded(
        &self,
        name: &str,
        lambdas: &[f64],
        f: impl Fn(f64, usize) -> Result<f64> + Sync + Send,
    ) -> Result<Vec<ConstantRow>> {
        lambdas
            .iter()
            .map(|&l| Ok(row(name, Some(l), &self.samples(|i| f(l, i))?)))
            .collect()
    }

    fn h_path(&self, c: Option<f64>, sample: usize) -> Result<Vec<f64>> {
        let m = self.spec.m;
        match c {
            None => Ok(vec![1.0; m]),
            Some(c) => {
                let path = NoisePath::generate(self.key(sample), self.spec.dt, m - 1, 1, 0)?;
                Ok(path
                    .betas(1, 0)
                    .iter()
                    .enumerate()
                    .map(|(k, b)| (-2.0 * c * b - 2.0 * c * c * k as f64 * self.spec.dt).exp())
                    .collect())
            }
        }
    }

    fn run(&self, est: &Estimate, table: &mut SweepTable) -> Result<()> {
        let name = est.name();
        let g = self.spec.grid;
        let o = &self.o;
        match est {
            Estimate::LinearSchrodinger { regime } | Estimate::LinearX { regime } => {
                let x = matches!(est, Estimate::LinearX { .. });
                let rows = self.banded(&name, &self.lambdas(), |l, i| {
                    let f = random_band_field(g, self.key(i), 0, l)?;
                    let b = self.free(&f)?;
                    let v = if x {
                        x_norm_band(&b, l, *regime, o)?
                    } else {
                        s_norm(&b, l, *regime, o)?
                    };
                    Ok(v / (l.powf(regime.s()) * f.l2_norm()))
                })?;
                table.rows.extend(rows);
            }
            Estimate::LinearWave { regime } => {
                let rows = self.banded(&name, &self.lambdas(), |l, i| {
                    let f = random_band_field(g, self.key(i), 0, l)?;
                    Ok(wave_norm(&self.free_wave(&f)?, l, *regime, o)? / f.l2_norm())
                })?;
                table.rows.extend(rows);
                let total = self.samples(|i| {
                    let f = random_field(g, self.key(i), 0, self.cutoff());
                    Ok(wave_total(&self.free_wave(&f)?, *regime, o)? / f.l2_norm())
                })?;
                table.rows.push(row(&name, None, &total));
            }
            Estimate::LocalSmoothing { axis } => {
                if *axis >= g.d() {
                    return Err(ZlabError::InvalidArgument(format!(
                        "axis {axis} out of range"
                    )));
                }
                let highs: Vec<f64> = self.lambdas().into_iter().filter(|&l| l > 1.0).collect();
                let rows = self.banded(&name, &highs, |mu, i| {
                    let f = random_field(g, self.key(i), 0, 2.0 * mu);
                    let b = self.free(&lateral_project(&f, mu, *axis))?;
                    Ok(mu.sqrt() * lateral_norm(&b, *axis, f64::INFINITY, 2.0) / f.l2_norm())
                })?;
                table.rows.extend(rows);
            }
            Estimate::BilinearEnergy | Estimate::BilinearEndpoint => {
                let energy = matches!(est, Estimate::BilinearEnergy);
                let r = self.samples(|i| {
                    let u = self.free(&random_field(g, self.key(i), 0, self.cutoff()))?;
                    let v = self.free_wave(&random_field(g, self.key(i), 1, self.cutoff()))?;
                    let vre = v.map_snapshots(|s| s.re());
                    let prod = vre.mul(&u)?;
                    Ok(if energy {
                        n_total(&prod, Regime::Energy, o)?
                            / (y_total(&v, o)? * s_total(&u, Regime::Energy, o)?)
                    } else {
                        n_total(&prod, Regime::Endpoint, o)?
                            / (wave_total(&v, Regime::Endpoint, o)?
                                * (d_norm(&u, o)? * s_total(&u, Regime::Endpoint, o)?).sqrt())
                    })
                })?;
                table.rows.push(row(&name, None, &r));
            }
            Estimate::WaveBilinearEndpoint
            | Estimate::WaveBilinearEnergy
            | Estimate::Trilinear { .. } => {
                let r =
                    self.samples(|i| {
                        let u = self.free(&random_field(g, self.key(i), 0, self.cutoff()))?;
                        let w = self.free(&random_field(g, self.key(i), 1, self.cutoff()))?;
                        match est {
                            Estimate::WaveBilinearEndpoint => {
                                let j = wave_duhamel(&u.mul(&w)?.map_snapshots(abs_grad))?;
                                let reg = Regime::Endpoint;
                                let den = (d_norm(&u, o)? * d_norm(&w, o)?).sqrt()
                                    * (s_total(&u, reg, o)? * s_total(&w, reg, o)?).sqrt();
                                Ok(wave_total(&j, reg, o)? / den)
                            }
                            Estimate::WaveBilinearEnergy => {
                                let phi_bar = u.map_snapshots(|s| s.conj());
                                let j = wave_duhamel(&phi_bar.mul(&w)?.map_snapshots(abs_grad))?;
                                let reg = Regime::Energy;
                                Ok(y_total(&j, o)? / (s_total(&u, reg, o)? * s_total(&w, reg, o)?))
                            }
                            Estimate::Trilinear { c } => {
                                let h = self.h_path(*c, i)?;
                                let phi_bar = u.map_snapshots(|s| s.conj());
                                let grad = phi_bar.mul(&w)?.map_snapshots(abs_grad);
                                let mut k = 0;
                                let weighted = grad.map_snapshots(|s| {
                                    let out = s.scale_re(h[k]);
                                    k += 1;
                                    out
                                });
                                let j = wave_duhamel(&weighted)?;
                                let hp = SampledPath::uniform(0.0, self.spec.dt, &h)?;
                                let hn = l6_norm(&hp)
                                    + besov_time_norm(
                                        &hp,
                                        0.125,
                                        6.0,
                                        f64::INFINITY,
                                        &BesovOptions::default(),
                                    )?;
                                let reg = Regime::Energy;
                                Ok(y_total(&j, o)?
                                    / (hn * s_total(&u, reg, o)? * s_total(&w, reg, o)?))
                            }
                            _ => unreachable!(),
                        }
                    })?;
                table.rows.push(row(&name, None, &r));
            }
            Estimate::NormChain => {
                let r = self.samples(|i| {
                    let u = self.free(&random_field(g, self.key(i), 0, self.cutoff()))?;
                    let half = s_total(&u, Regime::Endpoint, o)?;
                    Ok((
                        d_norm(&u, o)? / half,
                        half / s_total(&u, Regime::Energy, o)?,
                    ))
                })?;
                let (c1, c2): (Vec<f64>, Vec<f64>) = r.into_iter().unzip();
                table.rows.push(row("norm_chain_c1", None, &c1));
                table.rows.push(row("norm_chain_c2", None, &c2));
            }
            Estimate::Uniform { bound_frac } => {
                if !(*bound_frac > 0.0 && *bound_frac < 1.0) {
                    return Err(ZlabError::InvalidArgument(format!(
                        "potential bound fraction {bound_frac} must lie in (0, 1)"
                    )));
                }
                let b = bound_frac * GroundConstants::get().w2_norm();
                let r = self.samples(|i| {
                    let u0 = random_field(g, self.key(i), 0, self.cutoff());
                    let v0 = random_field(g, self.key(i), 1, self.cutoff()).scale_re(b);
                    let u = schrodinger_with_potential(&u0, &v0, self.spec.dt, self.spec.m)?;
                    Ok(s_total(&u, Regime::Endpoint, o)? / hs_norm(&u0, 0.5))
                })?;
                let mut prefixes: Vec<usize> = [10, 25, 50, 100, 200]
                    .into_iter()
                    .filter(|&p| p < r.len())
                    .collect();
                prefixes.push(r.len());
                for p in prefixes {
                    table.rows.push(row(&name, Some(p as f64), &r[..p]));
                }
            }
            Estimate::ProfileScaling { windows } => {
                if windows.len() < 2 || windows.iter().any(|w| !(*w > 0.0)) {
                    return Err(ZlabError::InvalidArgument(
                        "profile scaling needs ≥ 2 positive windows".into(),
                    ));
                }
                let lambdas = self.lambdas();
                let raw = NormOptions { taper: None, ..*o };
                let mut maxima = Vec::with_capacity(windows.len());
                for &len in windows {
                    let dt = len / (self.spec.m - 1) as f64;
                    let r = self.samples(|i| {
                        let mut best = 0.0f64;
                        for &l in &lambdas {
                            let f = band_packet(g, self.key(i), 0, l)?;
                            let b = SpaceTimeBlock::free_schrodinger(&f, 0.0, dt, self.spec.m)?;
                            best = best.max(d_norm(&b, &raw)? / hs_norm(&f, 1.0));
                        }
                        Ok(best)
                    })?;
                    let rw = row(&name, Some(len), &r);
                    maxima.push(rw.median);
                    table.rows.push(rw);
                }
                table.slopes.push((name, loglog_slope(windows, &maxima)));
            }
        }
        Ok(())
    }
}

/// Run every estimate of `spec` and collect the table.
pub fn estimate_constant_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.samples == 0 {
        return Err(ZlabError::InvalidArgument(
            "need at least one sample".into(),
        ));
    }
    if spec.m < crate::spectral::MIN_TEMPORAL_SAMPLES {
        return Err(ZlabError::BlockTooShort {
            needed: crate::spectral::MIN_TEMPORAL_SAMPLES,
            got: spec.m,
        });
    }
    let ctx = Ctx {
        spec,
        o: spec.options,
    };
    let mut table = SweepTable {
        rows: Vec::new(),
        slopes: Vec::new(),
    };
    for est in &spec.estimates {
        ctx.run(est, &mut table)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duhamel_of_zero_is_zero_and_starts_at_zero() {
        let g = Grid::new(2, 8, 6.0).unwrap();
        let f =
            SpaceTimeBlock::from_fn(g, 0.0, 0.1, 6, |t, x| Complex64::new(t + x[0], 0.0)).unwrap();
        let j = wave_duhamel(&f).unwrap();
        assert_eq!(j.snapshot(0).l2_norm(), 0.0);
        assert!(j.snapshot(5).l2_norm() > 0.0);
    }

    #[test]
    fn duhamel_of_constant_zero_mode_is_linear() {
        // F = 1 (ξ = 0): 𝒥₀[F](t) = −i t exactly under the trapezoid rule
        let g = Grid::new(1, 8, 6.0).unwrap();
        let f = SpaceTimeBlock::from_fn(g, 0.0, 0.1, 6, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        let j = wave_duhamel(&f).unwrap();
        let v = j.snapshot(5).physical().data()[3];
        assert!((v - Complex64::new(0.0, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.25)).collect();
        assert!((loglog_slope(&x, &y) - 0.25).abs() < 1e-12);
    }
}
