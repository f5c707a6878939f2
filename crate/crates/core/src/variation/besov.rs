//! Temporal Littlewood-Paley decomposition of sampled paths and the
//! inhomogeneous Besov norms `B^s_{p,q}` on a window.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::SampledPath;
use crate::error::{Result, ZlabError};
use crate::spectral::{
    chi_band, chi_low, fft_forward_raw, fft_inverse_raw, tukey, TemporalMode, ETA_PLATEAU,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovOptions {
    /// Mesh for resampling non-uniform paths; `None` uses the smallest sample spacing.
    pub dt: Option<f64>,
    /// Tukey taper fraction applied before the transform.
    pub taper: Option<f64>,
    /// Zero-pad (default) or treat the window as one period.
    pub mode: TemporalMode,
}

impl Default for BesovOptions {
    fn default() -> Self {
        Self {
            dt: None,
            taper: Some(0.1),
            mode: TemporalMode::ZeroPad,
        }
    }
}

impl BesovOptions {
    /// No taper: for paths that already vanish at both window ends.
    pub fn untapered() -> Self {
        Self {
            dt: None,
            taper: None,
            mode: TemporalMode::ZeroPad,
        }
    }
}

/// Dyadic temporal frequencies `1, 2, …, Λ` resolved on a mesh of step `dt`.
pub fn temporal_ladder(dt: f64) -> Vec<f64> {
    let nyquist = std::f64::consts::PI / dt;
    let mut out = vec![1.0];
    while ETA_PLATEAU * out.last().unwrap() < nyquist {
        out.push(out.last().unwrap() * 2.0);
    }
    out
}

fn uniform_values(path: &SampledPath, o: &BesovOptions) -> Result<(f64, Vec<Complex64>)> {
    if path.len() < 2 {
        return Err(ZlabError::InvalidArgument(
            "temporal bands need at least two samples".into(),
        ));
    }
    let p = match (path.uniform_step(), o.dt) {
        (Some(_), None) => path.clone(),
        (_, Some(dt)) => path.resample(dt)?,
        (None, None) => {
            let h = path
                .times()
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            path.resample(h)?
        }
    };
    let dt = p.uniform_step().expect("resampled path is uniform");
    let mut v = p.values().to_vec();
    if let Some(f) = o.taper.filter(|f| *f > 0.0) {
        let w = tukey(v.len(), f);
        for (x, w) in v.iter_mut().zip(w) {
            *x *= w;
        }
    }
    Ok((dt, v))
}

fn lp(values: &[Complex64], dt: f64, p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else {
        (values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * dt).powf(1.0 / p)
    }
}

/// `(λ, ‖P^{(t)}_λ x‖_{L^p})` for every temporal band, `λ = 1` being the low block.
///
/// In zero-pad mode the path is padded to twice its length before filtering;
/// the filtered signal is measured on the original window (rectangle rule).
pub fn temporal_bands(path: &SampledPath, p: f64, o: &BesovOptions) -> Result<Vec<(f64, f64)>> {
    let (dt, v) = uniform_values(path, o)?;
    let m = v.len();
    let np = match o.mode {
        TemporalMode::ZeroPad => 2 * m,
        TemporalMode::Periodic => m,
    };
    let mut spec = v.clone();
    spec.resize(np, Complex64::default());
    fft_forward_raw(&mut spec, &[np]);
    let tau = |k: usize| {
        let kk = if 2 * k <= np {
            k as f64
        } else {
            k as f64 - np as f64
        };
        (2.0 * std::f64::consts::PI * kk / (np as f64 * dt)).abs()
    };
    let mut out = Vec::new();
    for lambda in temporal_ladder(dt) {
        let mut buf: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let w = if lambda <= 1.0 {
                    chi_low(1.0, tau(k))
                } else {
                    chi_band(lambda, tau(k))
                };
                s * w
            })
            .collect();
        fft_inverse_raw(&mut buf, &[np]);
        out.push((lambda, lp(&buf[..m], dt, p)));
    }
    Ok(out)
}

/// `‖x‖_{B^s_{p,q}}` on the path's window (`q = ∞` gives the band supremum).
pub fn besov_time_norm(
    path: &SampledPath,
    s: f64,
    p: f64,
    q: f64,
    o: &BesovOptions,
) -> Result<f64> {
    let bands = temporal_bands(path, p, o)?;
    let terms = bands.into_iter().map(|(l, v)| l.powf(s) * v);
    Ok(if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    })
}

/// `‖x‖_{L⁶}` of the linear interpolant (trapezoid rule).
pub fn l6_norm(path: &SampledPath) -> f64 {
    path.lp_norm(6.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_signal_lives_in_low_block() {
        let p = SampledPath::uniform(0.0, 0.01, &vec![2.0; 400]).unwrap();
        let o = BesovOptions {
            dt: None,
            taper: None,
            mode: TemporalMode::Periodic,
        };
        let bands = temporal_bands(&p, 6.0, &o).unwrap();
        assert!(bands[1..].iter().all(|(_, v)| *v < 1e-13));
        let low = (400.0 * 0.01 * 2f64.powi(6)).powf(1.0 / 6.0);
        assert!((bands[0].1 - low).abs() < 1e-12);
        let b = besov_time_norm(&p, 0.125, 6.0, f64::INFINITY, &o).unwrap();
        assert!((b - low).abs() < 1e-12);
    }

    #[test]
    fn ladder_reaches_nyquist() {
        let l = temporal_ladder(0.01);
        assert!(ETA_PLATEAU * l.last().unwrap() >= std::f64::consts::PI / 0.01);
        assert_eq!(l[0], 1.0);
    }
}
