use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZlabError};

/// Largest number of grid points accepted by [`Grid::new`].
pub const MAX_POINTS: usize = 1 << 24;

/// Uniform periodic grid on the box `[-L/2, L/2)^d`.
///
/// Coordinates are `x_j = j·L/n − L/2`; wavenumbers follow the FFT ordering
/// `(2π/L)·{0, 1, …, n/2−1, −n/2, …, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: usize,
    n: usize,
    #[serde(rename = "L")]
    l: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, l: f64) -> Result<Self> {
        if !(1..=4).contains(&d) {
            return Err(ZlabError::InvalidGrid(format!(
                "dimension {d} not in 1..=4"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(ZlabError::InvalidGrid(format!(
                "n = {n} must be a power of two ≥ 4"
            )));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(ZlabError::InvalidGrid(format!(
                "box length {l} must be positive"
            )));
        }
        match n.checked_pow(d as u32) {
            Some(p) if p <= MAX_POINTS => {}
            _ => {
                return Err(ZlabError::InvalidGrid(format!(
                    "{n}^{d} points exceed the budget of {MAX_POINTS}"
                )))
            }
        }
        Ok(Self { d, n, l })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    /// Total number of points `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Quadrature weight of one cell, `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.d as i32)
    }

    pub fn volume(&self) -> f64 {
        self.l.powi(self.d as i32)
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.l
    }

    /// Signed integer frequency of FFT index `i`.
    pub fn freq_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Wavenumber of FFT index `i` along one axis.
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.freq_index(i) as f64 * self.dk()
    }

    /// Wavenumber used for first derivatives: zero at the Nyquist index so
    /// that derivatives of real fields stay real.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i)
        }
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.dx() - 0.5 * self.l
    }

    /// Nyquist wavenumber `π n / L` along one axis.
    pub fn nyquist(&self) -> f64 {
        0.5 * self.n as f64 * self.dk()
    }

    /// Largest `|ξ|` on the grid (the spectral corner).
    pub fn max_wavenumber(&self) -> f64 {
        (self.d as f64).sqrt() * self.nyquist()
    }

    /// Multi-index of a flat (row-major) index; the last axis is fastest.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.d).rev() {
            out[a] = flat % self.n;
            flat /= self.n;
        }
    }

    /// Stride of axis `a` in row-major order.
    pub fn stride(&self, a: usize) -> usize {
        self.n.pow((self.d - 1 - a) as u32)
    }

    /// Physical coordinates of every point, row-major.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, &[f64])) {
        let mut idx = [0usize; 4];
        let mut x = [0.0f64; 4];
        for flat in 0..self.len() {
            self.unravel(flat, &mut idx[..self.d]);
            for a in 0..self.d {
                x[a] = self.coordinate(idx[a]);
            }
            f(flat, &x[..self.d]);
        }
    }

    /// Wavevector of every spectral index, row-major.
    pub fn for_each_wavevector(&self, mut f: impl FnMut(usize, &[f64])) {
        let mut idx = [0usize; 4];
        let mut k = [0.0f64; 4];
        for flat in 0..self.len() {
            self.unravel(flat, &mut idx[..self.d]);
            for a in 0..self.d {
                k[a] = self.wavenumber(idx[a]);
            }
            f(flat, &k[..self.d]);
        }
    }

    /// `|ξ|²` at every spectral index.
    pub fn xi_norm2_table(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.for_each_wavevector(|i, k| out[i] = k.iter().map(|v| v * v).sum());
        out
    }

    /// `|ξ|` at every spectral index.
    pub fn xi_norm_table(&self) -> Vec<f64> {
        let mut t = self.xi_norm2_table();
        t.iter_mut().for_each(|v| *v = v.sqrt());
        t
    }

    /// Derivative wavenumbers along axis `a` at every spectral index.
    pub fn derivative_table(&self, a: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        let mut idx = [0usize; 4];
        for (flat, o) in out.iter_mut().enumerate() {
            self.unravel(flat, &mut idx[..self.d]);
            *o = self.derivative_wavenumber(idx[a]);
        }
        out
    }

    /// Mask of the modes kept by the 2/3 truncation rule (`|k_j| < n/3` on every axis).
    pub fn dealias_mask(&self) -> Vec<bool> {
        let cut = self.n as f64 / 3.0;
        let mut out = vec![true; self.len()];
        let mut idx = [0usize; 4];
        for (flat, o) in out.iter_mut().enumerate() {
            self.unravel(flat, &mut idx[..self.d]);
            *o = idx[..self.d]
                .iter()
                .all(|&i| (self.freq_index(i).abs() as f64) < cut);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(0, 8, 1.0).is_err());
        assert!(Grid::new(5, 8, 1.0).is_err());
        assert!(Grid::new(2, 6, 1.0).is_err());
        assert!(Grid::new(2, 2, 1.0).is_err());
        assert!(Grid::new(2, 8, -1.0).is_err());
        assert!(Grid::new(4, 8192, 1.0).is_err());
        assert!(Grid::new(4, 16, 1.0).is_ok());
    }

    #[test]
    fn wavenumber_ordering() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let k: Vec<i64> = (0..8).map(|i| g.freq_index(i)).collect();
        assert_eq!(k, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.derivative_wavenumber(4), 0.0);
        assert_eq!(g.coordinate(4), 0.0);
    }

    #[test]
    fn unravel_matches_strides() {
        let g = Grid::new(3, 4, 1.0).unwrap();
        let mut idx = [0; 3];
        g.unravel(1 * 16 + 2 * 4 + 3, &mut idx);
        assert_eq!(idx, [1, 2, 3]);
        assert_eq!(g.stride(0), 16);
        assert_eq!(g.stride(2), 1);
    }
}
