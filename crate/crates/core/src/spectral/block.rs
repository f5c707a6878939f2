//! Fields sampled on a uniform time window, and the space-time multipliers
//! (modulation and temporal-frequency projections) acting on them.
//!
//! Temporal frequencies follow `u(t) = Σ û(τ) e^{iτt}`, so the Schrödinger
//! operator `i∂_t + Δ` has symbol `−(τ + |ξ|²)` and free waves `e^{itΔ}f`
//! sit on the paraboloid `τ = −|ξ|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft;
use super::field::{Field, Rep};
use super::grid::Grid;
use super::ladder::{chi_band, chi_low};
use super::ops;
use crate::error::{Result, ZlabError};

/// Minimum number of samples for temporal-frequency operations.
pub const MIN_TEMPORAL_SAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TemporalMode {
    /// Zero-pad by one window length before the temporal FFT.
    #[default]
    ZeroPad,
    /// Treat the window as one period (for fields periodic in the window).
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandKind {
    Band,
    Low,
    High,
}

impl BandKind {
    fn profile(self, lambda: f64, r: f64) -> f64 {
        match self {
            BandKind::Band => chi_band(lambda, r),
            BandKind::Low => chi_low(lambda, r),
            BandKind::High => 1.0 - chi_low(lambda, r),
        }
    }
}

/// Snapshots `u(t₀ + k·dt)`, `k = 0..m`, stored time-major in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeBlock {
    grid: Grid,
    t0: f64,
    dt: f64,
    m: usize,
    data: Vec<Complex64>,
}

impl SpaceTimeBlock {
    pub fn from_flat(grid: Grid, t0: f64, dt: f64, m: usize, data: Vec<Complex64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ZlabError::InvalidArgument(format!(
                "time step {dt} must be positive"
            )));
        }
        if m == 0 {
            return Err(ZlabError::BlockTooShort { needed: 1, got: 0 });
        }
        if data.len() != m * grid.len() {
            return Err(ZlabError::InvalidArgument(
                "block data length mismatch".into(),
            ));
        }
        Ok(Self {
            grid,
            t0,
            dt,
            m,
            data,
        })
    }

    pub fn from_snapshots(t0: f64, dt: f64, snaps: &[Field]) -> Result<Self> {
        let first = snaps
            .first()
            .ok_or(ZlabError::BlockTooShort { needed: 1, got: 0 })?;
        let grid = *first.grid();
        let mut data = Vec::with_capacity(snaps.len() * grid.len());
        for s in snaps {
            first.check_grid(s)?;
            data.extend_from_slice(s.physical().data());
        }
        Self::from_flat(grid, t0, dt, snaps.len(), data)
    }

    pub fn zeros(grid: Grid, t0: f64, dt: f64, m: usize) -> Result<Self> {
        Self::from_flat(grid, t0, dt, m, vec![Complex64::default(); m * grid.len()])
    }

    /// Sample `f(t, x)` on the window.
    pub fn from_fn(
        grid: Grid,
        t0: f64,
        dt: f64,
        m: usize,
        mut f: impl FnMut(f64, &[f64]) -> Complex64,
    ) -> Result<Self> {
        let n = grid.len();
        let mut data = vec![Complex64::default(); m * n];
        for k in 0..m {
            let t = t0 + k as f64 * dt;
            grid.for_each_point(|i, x| data[k * n + i] = f(t, x));
        }
        Self::from_flat(grid, t0, dt, m, data)
    }

    /// Free Schrödinger evolution `e^{itΔ}f` sampled at `t = t₀ + k·dt`.
    pub fn free_schrodinger(f: &Field, t0: f64, dt: f64, m: usize) -> Result<Self> {
        let snaps: Vec<Field> = (0..m)
            .map(|k| ops::schrodinger_propagate(f, t0 + k as f64 * dt).physical())
            .collect();
        Self::from_snapshots(t0, dt, &snaps)
    }

    /// Free half-wave evolution `e^{it|∇|}g` sampled at `t = t₀ + k·dt`.
    pub fn free_wave(g: &Field, t0: f64, dt: f64, m: usize) -> Result<Self> {
        let snaps: Vec<Field> = (0..m)
            .map(|k| ops::wave_propagate(g, t0 + k as f64 * dt).physical())
            .collect();
        Self::from_snapshots(t0, dt, &snaps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of time samples.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Window length `m·dt` (rectangle-rule measure).
    pub fn duration(&self) -> f64 {
        self.m as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.t0 + k as f64 * self.dt).collect()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn slice(&self, k: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.data[k * n..(k + 1) * n]
    }

    pub fn snapshot(&self, k: usize) -> Field {
        Field::from_vec(self.grid, self.slice(k).to_vec(), Rep::Physical).expect("snapshot length")
    }

    pub fn snapshots(&self) -> Vec<Field> {
        (0..self.m).map(|k| self.snapshot(k)).collect()
    }

    pub fn map_snapshots(&self, mut f: impl FnMut(&Field) -> Field) -> SpaceTimeBlock {
        let n = self.grid.len();
        let mut data = Vec::with_capacity(self.data.len());
        for k in 0..self.m {
            data.extend_from_slice(f(&self.snapshot(k)).physical().data());
        }
        debug_assert_eq!(data.len(), self.m * n);
        Self {
            data,
            ..self.clone()
        }
    }

    pub fn try_map_snapshots(
        &self,
        mut f: impl FnMut(&Field) -> Result<Field>,
    ) -> Result<SpaceTimeBlock> {
        let mut data = Vec::with_capacity(self.data.len());
        for k in 0..self.m {
            data.extend_from_slice(f(&self.snapshot(k))?.physical().data());
        }
        Ok(Self {
            data,
            ..self.clone()
        })
    }

    pub fn scale(&self, a: Complex64) -> SpaceTimeBlock {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= a);
        out
    }

    pub fn axpy(&self, a: Complex64, other: &SpaceTimeBlock) -> Result<SpaceTimeBlock> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(x, y)| *x += a * y);
        Ok(out)
    }

    pub fn check_compatible(&self, other: &SpaceTimeBlock) -> Result<()> {
        if self.grid != other.grid || self.m != other.m || self.dt != other.dt {
            Err(ZlabError::GridMismatch)
        } else {
            Ok(())
        }
    }

    /// Pointwise product (physical space, same time mesh).
    pub fn mul(&self, other: &SpaceTimeBlock) -> Result<SpaceTimeBlock> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(x, y)| *x *= y);
        Ok(out)
    }

    /// Samples `k0..k1` as a new block.
    pub fn restrict(&self, k0: usize, k1: usize) -> Result<SpaceTimeBlock> {
        if k0 >= k1 || k1 > self.m {
            return Err(ZlabError::InvalidArgument(format!(
                "bad sub-window {k0}..{k1}"
            )));
        }
        let n = self.grid.len();
        Self::from_flat(
            self.grid,
            self.t0 + k0 as f64 * self.dt,
            self.dt,
            k1 - k0,
            self.data[k0 * n..k1 * n].to_vec(),
        )
    }

    /// Extend by zeros on both sides.
    pub fn extend_zero(&self, before: usize, after: usize) -> SpaceTimeBlock {
        let n = self.grid.len();
        let mut data = vec![Complex64::default(); (before + self.m + after) * n];
        data[before * n..(before + self.m) * n].copy_from_slice(&self.data);
        Self {
            grid: self.grid,
            t0: self.t0 - before as f64 * self.dt,
            dt: self.dt,
            m: before + self.m + after,
            data,
        }
    }

    /// Multiply every snapshot by a Tukey window with taper fraction `frac`.
    pub fn taper(&self, frac: f64) -> SpaceTimeBlock {
        let w = tukey(self.m, frac);
        let n = self.grid.len();
        let mut out = self.clone();
        for (k, wk) in w.iter().enumerate() {
            out.data[k * n..(k + 1) * n]
                .iter_mut()
                .for_each(|v| *v *= wk);
        }
        out
    }

    fn padded_len(&self, mode: TemporalMode) -> usize {
        match mode {
            TemporalMode::ZeroPad => 2 * self.m,
            TemporalMode::Periodic => self.m,
        }
    }

    /// Temporal frequency of padded index `k`, in `(−π/dt, π/dt]`.
    fn tau(&self, k: usize, p: usize) -> f64 {
        let kk = if 2 * k <= p {
            k as i64
        } else {
            k as i64 - p as i64
        };
        2.0 * std::f64::consts::PI * kk as f64 / (p as f64 * self.dt)
    }

    /// Temporal frequency spacing of the padded transform.
    pub fn tau_resolution(&self, mode: TemporalMode) -> f64 {
        2.0 * std::f64::consts::PI / (self.padded_len(mode) as f64 * self.dt)
    }

    /// Apply a space-time Fourier multiplier `m(τ, |ξ|)` and restrict back to the window.
    pub fn spacetime_multiplier(
        &self,
        mode: TemporalMode,
        m: impl Fn(f64, f64) -> Complex64,
    ) -> Result<SpaceTimeBlock> {
        let xi = self.grid.xi_norm_table();
        self.apply_indexed(mode, |tau, i| m(tau, xi[i]))
    }

    /// Apply a space-time multiplier `m(τ, ξ)` depending on the full wavevector.
    pub fn spacetime_multiplier_vec(
        &self,
        mode: TemporalMode,
        m: impl Fn(f64, &[f64]) -> Complex64,
    ) -> Result<SpaceTimeBlock> {
        let d = self.grid.d();
        let mut ks = vec![0.0; self.grid.len() * d];
        self.grid
            .for_each_wavevector(|i, k| ks[i * d..(i + 1) * d].copy_from_slice(&k[..d]));
        self.apply_indexed(mode, |tau, i| m(tau, &ks[i * d..(i + 1) * d]))
    }

    fn apply_indexed(
        &self,
        mode: TemporalMode,
        m: impl Fn(f64, usize) -> Complex64,
    ) -> Result<SpaceTimeBlock> {
        if self.m < MIN_TEMPORAL_SAMPLES {
            return Err(ZlabError::BlockTooShort {
                needed: MIN_TEMPORAL_SAMPLES,
                got: self.m,
            });
        }
        let n = self.grid.len();
        let p = self.padded_len(mode);
        let mut buf = vec![Complex64::default(); p * n];
        buf[..self.m * n].copy_from_slice(&self.data);
        let mut shape = vec![p];
        shape.extend(std::iter::repeat(self.grid.n()).take(self.grid.d()));
        fft::forward(&mut buf, &shape);
        for k in 0..p {
            let tau = self.tau(k, p);
            for (i, v) in buf[k * n..(k + 1) * n].iter_mut().enumerate() {
                *v *= m(tau, i);
            }
        }
        fft::inverse(&mut buf, &shape);
        buf.truncate(self.m * n);
        Ok(Self {
            data: buf,
            ..self.clone()
        })
    }

    /// Modulation projection: multiplier on the distance `|τ + |ξ|²|` to the paraboloid.
    pub fn modulation_project(
        &self,
        lambda: f64,
        kind: BandKind,
        mode: TemporalMode,
    ) -> Result<SpaceTimeBlock> {
        check_positive(lambda)?;
        self.spacetime_multiplier(mode, |tau, r| {
            Complex64::new(kind.profile(lambda, (tau + r * r).abs()), 0.0)
        })
    }

    /// Temporal-frequency projection: multiplier on `|τ|`.
    pub fn temporal_project(
        &self,
        lambda: f64,
        kind: BandKind,
        mode: TemporalMode,
    ) -> Result<SpaceTimeBlock> {
        check_positive(lambda)?;
        self.spacetime_multiplier(mode, |tau, _| {
            Complex64::new(kind.profile(lambda, tau.abs()), 0.0)
        })
    }

    /// `(Σ_k dt ‖u(t_k)‖^q_{L^r})^{1/q}`; `q` or `r` may be infinite.
    pub fn mixed_norm(&self, q: f64, r: f64) -> f64 {
        let norms: Vec<f64> = (0..self.m).map(|k| self.snapshot(k).lp_norm(r)).collect();
        if q.is_infinite() {
            norms.into_iter().fold(0.0, f64::max)
        } else {
            let s: f64 = norms.iter().map(|v| v.powf(q)).sum();
            (s * self.dt).powf(1.0 / q)
        }
    }

    pub fn linf_l2(&self) -> f64 {
        self.mixed_norm(f64::INFINITY, 2.0)
    }

    pub fn l2_l2(&self) -> f64 {
        let s: f64 = self.data.iter().map(|v| v.norm_sqr()).sum();
        (s * self.dt * self.grid.cell_volume()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

fn check_positive(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(ZlabError::InvalidArgument(format!(
            "frequency {lambda} must be positive"
        )))
    }
}

/// Tukey window of length `m` with taper fraction `frac ∈ [0, 1]`.
pub fn tukey(m: usize, frac: f64) -> Vec<f64> {
    let frac = frac.clamp(0.0, 1.0);
    if m <= 1 || frac == 0.0 {
        return vec![1.0; m];
    }
    let width = frac * (m - 1) as f64 / 2.0;
    (0..m)
        .map(|k| {
            let x = k as f64;
            let y = (m - 1) as f64 - x;
            let e = x.min(y);
            if e < width {
                0.5 * (1.0 - (std::f64::consts::PI * e / width).cos())
            } else {
                1.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tukey_endpoints() {
        let w = tukey(11, 0.5);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[10], 0.0);
        assert_eq!(w[5], 1.0);
        assert!(w.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn single_snapshot_rejected() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let b = SpaceTimeBlock::zeros(g, 0.0, 0.1, 1).unwrap();
        assert!(b
            .modulation_project(1.0, BandKind::Low, TemporalMode::ZeroPad)
            .is_err());
    }

    #[test]
    fn periodic_time_derivative_is_exact() {
        // u = e^{iτt} with τ on the periodic mesh: multiplier iτ reproduces ∂_t
        let g = Grid::new(1, 8, 1.0).unwrap();
        let m = 16;
        let dt = 0.1;
        let tau = 2.0 * std::f64::consts::PI * 3.0 / (m as f64 * dt);
        let b = SpaceTimeBlock::from_fn(g, 0.0, dt, m, |t, _| Complex64::from_polar(1.0, tau * t))
            .unwrap();
        let d = b
            .spacetime_multiplier(TemporalMode::Periodic, |t, _| Complex64::new(0.0, t))
            .unwrap();
        let want = b.scale(Complex64::new(0.0, tau));
        let err = d.axpy(Complex64::new(-1.0, 0.0), &want).unwrap().l2_l2();
        assert!(err < 1e-12 * want.l2_l2());
    }
}
