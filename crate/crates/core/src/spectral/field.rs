use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::Grid;
use crate::error::{Result, ZlabError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rep {
    Physical,
    Spectral,
}

/// Complex scalar function on a periodic grid.
///
/// Spectral data are the unnormalised DFT coefficients, so the discrete
/// L² norm is `√(dx^d Σ|f|²)` physically and `√(dx^d/N Σ|f̂|²)` spectrally.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    data: Vec<Complex64>,
    rep: Rep,
}

impl Field {
    pub fn zeros(grid: Grid, rep: Rep) -> Self {
        Self {
            grid,
            data: vec![Complex64::default(); grid.len()],
            rep,
        }
    }

    pub fn from_vec(grid: Grid, data: Vec<Complex64>, rep: Rep) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(ZlabError::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data, rep })
    }

    /// Sample `f` at the physical grid points.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let mut data = vec![Complex64::default(); grid.len()];
        grid.for_each_point(|i, x| data[i] = f(x));
        Self {
            grid,
            data,
            rep: Rep::Physical,
        }
    }

    pub fn from_real_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Plane wave `e^{i k·x}` with integer frequency vector `m` (`k = 2π m / L`).
    pub fn plane_wave(grid: Grid, m: &[i64]) -> Self {
        let dk = grid.dk();
        Self::from_fn(grid, |x| {
            let phase: f64 = x.iter().zip(m).map(|(xi, mi)| xi * dk * *mi as f64).sum();
            Complex64::from_polar(1.0, phase)
        })
    }

    pub fn constant(grid: Grid, value: Complex64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
            rep: Rep::Physical,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    fn shape(&self) -> Vec<usize> {
        vec![self.grid.n(); self.grid.d()]
    }

    /// Physical → spectral.
    pub fn fft_forward(&self) -> Result<Field> {
        if self.rep != Rep::Physical {
            return Err(ZlabError::InvalidArgument(
                "field is already spectral".into(),
            ));
        }
        if !self.is_finite() {
            return Err(ZlabError::NonFinite);
        }
        let mut out = self.clone();
        fft::forward(&mut out.data, &self.shape());
        out.rep = Rep::Spectral;
        Ok(out)
    }

    /// Spectral → physical.
    pub fn fft_inverse(&self) -> Result<Field> {
        if self.rep != Rep::Spectral {
            return Err(ZlabError::InvalidArgument(
                "field is already physical".into(),
            ));
        }
        if !self.is_finite() {
            return Err(ZlabError::NonFinite);
        }
        let mut out = self.clone();
        fft::inverse(&mut out.data, &self.shape());
        out.rep = Rep::Physical;
        Ok(out)
    }

    /// Convert in place; no finiteness check (used on hot paths).
    pub fn set_rep(&mut self, rep: Rep) {
        if rep == self.rep {
            return;
        }
        let shape = self.shape();
        match rep {
            Rep::Spectral => fft::forward(&mut self.data, &shape),
            Rep::Physical => fft::inverse(&mut self.data, &shape),
        }
        self.rep = rep;
    }

    pub fn to_rep(&self, rep: Rep) -> Field {
        let mut out = self.clone();
        out.set_rep(rep);
        out
    }

    pub fn physical(&self) -> Field {
        self.to_rep(Rep::Physical)
    }

    pub fn spectral(&self) -> Field {
        self.to_rep(Rep::Spectral)
    }

    fn sum_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Discrete `‖f‖²_{L²}` in either representation.
    pub fn l2_norm_sq(&self) -> f64 {
        match self.rep {
            Rep::Physical => self.sum_sq() * self.grid.cell_volume(),
            Rep::Spectral => self.sum_sq() * self.grid.cell_volume() / self.grid.len() as f64,
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// Discrete `‖f‖_{L^p}`, `p = ∞` allowed.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let phys;
        let f = if self.rep == Rep::Physical {
            self
        } else {
            phys = self.physical();
            &phys
        };
        if p.is_infinite() {
            return f.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let s: f64 = f.data.iter().map(|v| v.norm().powf(p)).sum();
        (s * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    /// `Σ ω(ξ)|f̂(ξ)|²` with the L² normalisation, for a weight on |ξ|².
    pub fn weighted_spectral_sq(&self, mut w: impl FnMut(f64) -> f64) -> f64 {
        let s = self.spectral();
        let mut acc = 0.0;
        self.grid.for_each_wavevector(|i, k| {
            let k2: f64 = k.iter().map(|v| v * v).sum();
            acc += w(k2) * s.data[i].norm_sqr();
        });
        acc * self.grid.cell_volume() / self.grid.len() as f64
    }

    /// `‖∇f‖²_{L²}`.
    pub fn grad_norm_sq(&self) -> f64 {
        self.weighted_spectral_sq(|k2| k2)
    }

    /// `‖f‖_{H¹} = ‖⟨∇⟩f‖_{L²}`.
    pub fn h1_norm(&self) -> f64 {
        self.weighted_spectral_sq(|k2| 1.0 + k2).sqrt()
    }

    /// `⟨f, g⟩ = ∫ f ḡ` (physical quadrature).
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_grid(other)?;
        let a = self.physical();
        let b = other.physical();
        let s: Complex64 = a.data.iter().zip(&b.data).map(|(x, y)| x * y.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            Err(ZlabError::GridMismatch)
        } else {
            Ok(())
        }
    }

    /// Pointwise map in physical space.
    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Field {
        let mut out = self.physical();
        out.data.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    /// Pointwise combination in physical space.
    pub fn zip_map(
        &self,
        other: &Field,
        mut f: impl FnMut(Complex64, Complex64) -> Complex64,
    ) -> Result<Field> {
        self.check_grid(other)?;
        let mut out = self.physical();
        let b = other.physical();
        out.data
            .iter_mut()
            .zip(&b.data)
            .for_each(|(x, y)| *x = f(*x, *y));
        Ok(out)
    }

    /// `|f|²` as a real-valued field.
    pub fn abs_sq(&self) -> Field {
        self.map(|v| Complex64::new(v.norm_sqr(), 0.0))
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    pub fn re(&self) -> Field {
        self.map(|v| Complex64::new(v.re, 0.0))
    }

    pub fn scale(&self, a: Complex64) -> Field {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= a);
        out
    }

    pub fn scale_re(&self, a: f64) -> Field {
        self.scale(Complex64::new(a, 0.0))
    }

    /// `self + a·other`, in the representation of `self`.
    pub fn axpy(&self, a: Complex64, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let o = other.to_rep(self.rep);
        let mut out = self.clone();
        out.data
            .iter_mut()
            .zip(&o.data)
            .for_each(|(x, y)| *x += a * y);
        Ok(out)
    }

    /// Relative distance `‖self − other‖ / max(‖other‖, tiny)`.
    pub fn rel_diff(&self, other: &Field) -> f64 {
        let d = (self - other).l2_norm();
        d / other.l2_norm().max(f64::MIN_POSITIVE)
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.axpy(Complex64::new(1.0, 0.0), rhs)
            .expect("grid mismatch in Field + Field")
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.axpy(Complex64::new(-1.0, 0.0), rhs)
            .expect("grid mismatch in Field - Field")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale_re(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(2, 16, 7.0).unwrap()
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let g = grid();
        let mut f = Field::zeros(g, Rep::Physical);
        f.data_mut()[0] = Complex64::new(1.0, 0.0);
        let s = f.fft_forward().unwrap();
        for v in s.data() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let g = grid();
        let mut f = Field::zeros(g, Rep::Physical);
        f.data_mut()[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(f.fft_forward(), Err(ZlabError::NonFinite)));
    }

    #[test]
    fn h1_of_plane_wave() {
        let g = grid();
        let f = Field::plane_wave(g, &[2, -1]);
        let k2 = 5.0 * g.dk().powi(2);
        assert!((f.grad_norm_sq() - k2 * g.volume()).abs() < 1e-9);
        assert!((f.l2_norm_sq() - g.volume()).abs() < 1e-10);
    }
}
