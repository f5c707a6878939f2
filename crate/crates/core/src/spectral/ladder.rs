//! Smooth cut-off profiles and the dyadic frequency ladder.

use std::sync::OnceLock;

use super::grid::Grid;
use crate::error::{Result, ZlabError};

const STEP_NODES: usize = 1 << 17;

/// Tabulated smooth step `S: [0,1] → [0,1]`, the normalised primitive of the
/// standard mollifier `exp(−1/(1−y²))` with `y = 2s−1`.
struct StepTable {
    values: Vec<f64>,
}

impl StepTable {
    fn build() -> Self {
        let bump = |s: f64| {
            let y = 2.0 * s - 1.0;
            let q = 1.0 - y * y;
            if q <= 0.0 {
                0.0
            } else {
                (-1.0 / q).exp()
            }
        };
        // three-point Gauss-Legendre per cell
        let g = (0.6f64).sqrt();
        let h = 1.0 / STEP_NODES as f64;
        let mut values = Vec::with_capacity(STEP_NODES + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for i in 0..STEP_NODES {
            let mid = (i as f64 + 0.5) * h;
            let half = 0.5 * h;
            acc += half
                * (5.0 / 9.0 * bump(mid - g * half)
                    + 8.0 / 9.0 * bump(mid)
                    + 5.0 / 9.0 * bump(mid + g * half));
            values.push(acc);
        }
        let total = acc;
        values.iter_mut().for_each(|v| *v /= total);
        *values.last_mut().unwrap() = 1.0;
        Self { values }
    }

    fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        let x = s * STEP_NODES as f64;
        let i = (x as usize).min(STEP_NODES - 1);
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

fn step_table() -> &'static StepTable {
    static TABLE: OnceLock<StepTable> = OnceLock::new();
    TABLE.get_or_init(StepTable::build)
}

/// Smooth monotone step: 0 for `s ≤ 0`, 1 for `s ≥ 1`.
pub fn smooth_step(s: f64) -> f64 {
    step_table().eval(s)
}

pub const ETA_PLATEAU: f64 = 1.25;
pub const ETA_SUPPORT: f64 = 1.6;

/// The even cut-off `η₀`: 1 on `|r| ≤ 5/4`, 0 on `|r| ≥ 8/5`.
pub fn eta0(r: f64) -> f64 {
    let r = r.abs();
    if r <= ETA_PLATEAU {
        1.0
    } else if r >= ETA_SUPPORT {
        0.0
    } else {
        1.0 - smooth_step((r - ETA_PLATEAU) / (ETA_SUPPORT - ETA_PLATEAU))
    }
}

/// Lateral profile: 0 for `|r| ≤ 1/8` or `|r| ≥ 4`, 1 on `1/4 ≤ |r| ≤ 2`.
pub fn lateral_phi(r: f64) -> f64 {
    let r = r.abs();
    if r <= 0.125 || r >= 4.0 {
        0.0
    } else if r < 0.25 {
        smooth_step((r - 0.125) / 0.125)
    } else if r <= 2.0 {
        1.0
    } else {
        1.0 - smooth_step((r - 2.0) / 2.0)
    }
}

/// `χ_{≤λ}(r) = η₀(r/λ)`.
pub fn chi_low(lambda: f64, r: f64) -> f64 {
    eta0(r / lambda)
}

/// `χ_λ(r) = η₀(r/λ) − η₀(2r/λ)`.
pub fn chi_band(lambda: f64, r: f64) -> f64 {
    eta0(r / lambda) - eta0(2.0 * r / lambda)
}

/// Whether `x` is an integer power of two (negative exponents allowed).
pub fn is_dyadic(x: f64) -> bool {
    if !(x.is_finite() && x > 0.0) {
        return false;
    }
    let l = x.log2();
    (l - l.round()).abs() < 1e-12
}

/// The dyadic frequencies `1, 2, …, Λ` resolvable on a grid.
///
/// `Λ` is the smallest power of two whose `η₀` plateau (`5Λ/4`) covers the
/// spectral corner, so `P_1 + Σ_{1<λ≤Λ} P_λ` is the identity on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicLadder {
    top: f64,
    k: f64,
}

/// Default surrogate for the large projector constant separating low and
/// high modulations.
pub const DEFAULT_K: f64 = 4.0;

impl DyadicLadder {
    pub fn for_grid(grid: &Grid) -> Self {
        Self::with_k(grid, DEFAULT_K)
    }

    pub fn with_k(grid: &Grid, k: f64) -> Self {
        let kmax = grid.max_wavenumber();
        let mut top = 1.0;
        while ETA_PLATEAU * top < kmax {
            top *= 2.0;
        }
        Self { top, k }
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambdas(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        while *out.last().unwrap() < self.top {
            out.push(out.last().unwrap() * 2.0);
        }
        out
    }

    /// Band profile of `P_λ`; `λ = 1` is the low block `P_{≤1}`.
    pub fn band(&self, lambda: f64, r: f64) -> f64 {
        if lambda <= 1.0 {
            chi_low(1.0, r)
        } else {
            chi_band(lambda, r)
        }
    }

    /// Validate a frequency for band projection.
    pub fn check_band(&self, lambda: f64) -> Result<()> {
        if !is_dyadic(lambda) || lambda < 1.0 {
            return Err(ZlabError::NotDyadic(lambda));
        }
        self.check_top(lambda)
    }

    /// Validate a frequency for `P_{≤λ}` / `P_{>λ}` (fractional powers of two allowed).
    pub fn check_threshold(&self, lambda: f64) -> Result<()> {
        if !is_dyadic(lambda) {
            return Err(ZlabError::NotDyadic(lambda));
        }
        self.check_top(lambda)
    }

    fn check_top(&self, lambda: f64) -> Result<()> {
        if lambda > self.top {
            Err(ZlabError::BeyondNyquist {
                lambda,
                top: self.top,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_plateau_and_support() {
        assert_eq!(eta0(0.0), 1.0);
        assert_eq!(eta0(1.25), 1.0);
        assert_eq!(eta0(-1.6), 0.0);
        assert_eq!(eta0(3.0), 0.0);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = eta0(1.25 + 0.35 * i as f64 / 1000.0);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn step_is_symmetric() {
        // the mollifier is even about s = 1/2
        for &s in &[0.1, 0.25, 0.4, 0.5] {
            assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn band_passes_its_own_frequency() {
        for &l in &[2.0, 4.0, 8.0] {
            assert_eq!(chi_band(l, l), 1.0);
            assert_eq!(chi_band(l, 0.5 * l), 0.0);
            assert_eq!(chi_band(l, 2.0 * l), 0.0);
        }
    }

    #[test]
    fn lateral_profile_shape() {
        assert_eq!(lateral_phi(0.1), 0.0);
        assert_eq!(lateral_phi(0.75), 1.0);
        assert_eq!(lateral_phi(-2.0), 1.0);
        assert_eq!(lateral_phi(4.0), 0.0);
        assert!(lateral_phi(3.0) > 0.0 && lateral_phi(3.0) < 1.0);
    }

    #[test]
    fn ladder_top_covers_corner() {
        let g = Grid::new(4, 16, 16.0).unwrap();
        let l = DyadicLadder::for_grid(&g);
        assert!(ETA_PLATEAU * l.top() >= g.max_wavenumber());
        assert!(ETA_PLATEAU * l.top() / 2.0 < g.max_wavenumber());
        assert!(l.check_band(2.0 * l.top()).is_err());
        assert!(l.check_band(3.0).is_err());
        assert!(l.check_threshold(0.25).is_ok());
    }
}
