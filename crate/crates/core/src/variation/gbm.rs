//! Monte-Carlo studies of the geometric Brownian motion
//! `h_c(t) = exp(−2cβ(t) − 2c²t)`: global `V^p` control and tail decay.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::besov::{besov_time_norm, l6_norm, BesovOptions};
use super::path::SampledPath;
use super::pvar::{p_variation, vp_norm};
use crate::error::{Result, ZlabError};
use crate::noise::{NoiseKey, NoisePath};

/// `(h_c, β)` sampled on `[0, horizon]` with step `dt`, driven by mode 0 of
/// the `W₁` stream of `key`.
pub fn gbm_path(
    key: NoiseKey,
    c: f64,
    dt: f64,
    horizon: f64,
) -> Result<(SampledPath, SampledPath)> {
    let steps = steps_for(horizon, dt)?;
    let noise = NoisePath::generate(key, dt, steps, 1, 0)?;
    let beta = noise.betas(1, 0);
    let h: Vec<f64> = beta
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let t = k as f64 * dt;
            (-2.0 * c * b - 2.0 * c * c * t).exp()
        })
        .collect();
    Ok((
        SampledPath::uniform(0.0, dt, &h)?,
        SampledPath::uniform(0.0, dt, beta)?,
    ))
}

fn steps_for(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0 && horizon.is_finite() && horizon > 0.0) {
        return Err(ZlabError::InvalidArgument(format!(
            "need positive dt and horizon (got {dt}, {horizon})"
        )));
    }
    let steps = (horizon / dt).round() as usize;
    if steps == 0 || ((steps as f64 * dt) - horizon).abs() > 1e-9 * horizon {
        return Err(ZlabError::InvalidArgument(format!(
            "horizon {horizon} is not a multiple of {dt}"
        )));
    }
    Ok(steps)
}

/// Empirical quantile (nearest rank) of unsorted data.
pub fn quantile(data: &[f64], q: f64) -> f64 {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let idx = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    v[idx]
}

/// Median as the mean of the two middle order statistics for even counts.
pub fn median(data: &[f64]) -> f64 {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VpRow {
    pub horizon: f64,
    pub median_h: f64,
    pub q90_h: f64,
    pub median_beta: f64,
    pub q90_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VpExperiment {
    pub c: f64,
    pub p: f64,
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub rows: Vec<VpRow>,
}

/// `|h_c|_{V^p,[0,T]}` and `|β|_{V^p,[0,T]}` statistics for each horizon `T`.
///
/// All horizons reuse the same `M` paths (restricted to `[0, T]`), so
/// differences between rows are not blurred by resampling noise.
pub fn gbm_vp_experiment(
    c: f64,
    p: f64,
    horizons: &[f64],
    paths: usize,
    dt: f64,
    seed: u64,
) -> Result<VpExperiment> {
    if horizons.is_empty() || horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ZlabError::InvalidArgument(
            "horizons must be nonempty and increasing".into(),
        ));
    }
    if paths < 100 {
        return Err(ZlabError::InvalidArgument(format!(
            "need at least 100 paths (got {paths})"
        )));
    }
    let tmax = *horizons.last().unwrap();
    for &t in horizons {
        steps_for(t, dt)?;
    }
    let per_path: Vec<Vec<(f64, f64)>> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let (h, beta) = gbm_path(NoiseKey::new(seed, i as u64), c, dt, tmax)?;
            horizons
                .iter()
                .map(|&t| {
                    let hv = p_variation(&h.restrict(0.0, t + 0.5 * dt)?, p)?;
                    let bv = p_variation(&beta.restrict(0.0, t + 0.5 * dt)?, p)?;
                    Ok((hv, bv))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let rows = horizons
        .iter()
        .enumerate()
        .map(|(k, &horizon)| {
            let hs: Vec<f64> = per_path.iter().map(|r| r[k].0).collect();
            let bs: Vec<f64> = per_path.iter().map(|r| r[k].1).collect();
            VpRow {
                horizon,
                median_h: median(&hs),
                q90_h: quantile(&hs, 0.9),
                median_beta: median(&bs),
                q90_beta: quantile(&bs, 0.9),
            }
        })
        .collect();
    Ok(VpExperiment {
        c,
        p,
        paths,
        dt,
        seed,
        rows,
    })
}

/// `h_c` on `[−1/c², horizon/c²]` with the ramp `c²t + 1` before zero,
/// built from one Brownian sample `β̃` through `cβ(t) = β̃(c²t)`.
///
/// `unit` is `h_1` sampled with step `dt` from `t = 0`, already carrying its
/// ramp on `[−1, 0)`; the sample sequence is shared by every `c`, only the
/// time step changes to `dt/c²`.
pub fn scaled_gbm(unit: &SampledPath, c: f64) -> Result<SampledPath> {
    let dt = unit
        .uniform_step()
        .ok_or_else(|| ZlabError::InvalidArgument("unit path must be uniform".into()))?;
    let c2 = c * c;
    let values: Vec<f64> = unit.values().iter().map(|v| v.re).collect();
    SampledPath::uniform(unit.start() / c2, dt / c2, &values)
}

/// `‖h‖_{L⁶} + ‖h‖_{B^{1/8}_{6,∞}}` on the path's window.
pub fn tail_functional(h: &SampledPath) -> Result<f64> {
    Ok(l6_norm(h) + besov_time_norm(h, 0.125, 6.0, f64::INFINITY, &BesovOptions::untapered())?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub c: f64,
    pub p_exceed: f64,
    pub se: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailExperiment {
    pub c_prime: f64,
    pub paths: usize,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    pub rows: Vec<TailRow>,
}

/// Empirical `P(‖h_c‖_{L⁶} + ‖h_c‖_{B^{1/8}_{6,∞}} ≥ C′)` for each `c`, with
/// `h_c` extended by its ramp and sampled through Brownian scaling so every
/// `c` sees the same Brownian paths. `dt` and `horizon` are in `h_1` time.
pub fn gbm_tail_experiment(
    c_list: &[f64],
    c_prime: f64,
    paths: usize,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<TailExperiment> {
    if c_list.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(ZlabError::InvalidArgument(
            "noise strengths must be positive".into(),
        ));
    }
    if paths == 0 {
        return Err(ZlabError::InvalidArgument("need at least one path".into()));
    }
    let per_path: Vec<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let (h, _) = gbm_path(NoiseKey::new(seed, i as u64), 1.0, dt, horizon)?;
            let unit = h.with_ramp_prefix(1.0)?;
            c_list
                .iter()
                .map(|&c| tail_functional(&scaled_gbm(&unit, c)?))
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows = c_list
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let v: Vec<f64> = per_path.iter().map(|r| r[k]).collect();
            let hits = v.iter().filter(|&&x| x >= c_prime).count() as f64;
            let p = hits / paths as f64;
            TailRow {
                c,
                p_exceed: p,
                se: (p * (1.0 - p) / paths as f64).sqrt(),
                median: median(&v),
            }
        })
        .collect();
    Ok(TailExperiment {
        c_prime,
        paths,
        dt,
        horizon,
        seed,
        rows,
    })
}

/// `‖h‖_{B^{1/8}_{6,∞}} / (‖h‖_{L^{15}}^{5/8} (‖h‖_{L³}^{3/8} + |h|_{V³}^{3/8}))`.
pub fn interpolation_ratio(h: &SampledPath) -> Result<f64> {
    let b = besov_time_norm(h, 0.125, 6.0, f64::INFINITY, &BesovOptions::untapered())?;
    let den = h.lp_norm(15.0).powf(0.625)
        * (h.lp_norm(3.0).powf(0.375) + p_variation(h, 3.0)?.powf(0.375));
    Ok(b / den)
}

/// `sup_λ λ^{1/3}‖P^{(t)}_λ h‖_{L³} / ‖h‖_{V³}`: the `V³ ⊂ B^{1/3}_{3,∞}` direction.
pub fn embedding_ratio(h: &SampledPath) -> Result<f64> {
    let b = besov_time_norm(h, 1.0 / 3.0, 3.0, f64::INFINITY, &BesovOptions::untapered())?;
    Ok(b / vp_norm(h, 3.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_path_shares_samples() {
        let (h, _) = gbm_path(NoiseKey::new(1, 0), 1.0, 0.01, 1.0).unwrap();
        let unit = h.with_ramp_prefix(1.0).unwrap();
        let s = scaled_gbm(&unit, 2.0).unwrap();
        assert_eq!(s.values(), unit.values());
        assert!((s.start() + 0.25).abs() < 1e-12);
        assert!((s.end() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn l6_scales_like_c_to_minus_third() {
        let (h, _) = gbm_path(NoiseKey::new(2, 0), 1.0, 0.01, 10.0).unwrap();
        let unit = h.with_ramp_prefix(1.0).unwrap();
        let a = l6_norm(&scaled_gbm(&unit, 1.0).unwrap());
        let b = l6_norm(&scaled_gbm(&unit, 4.0).unwrap());
        assert!((b / a - 4f64.powf(-1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn quantiles() {
        let d = [5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(median(&d), 3.0);
        assert_eq!(quantile(&d, 0.9), 5.0);
        assert_eq!(median(&[1.0, 2.0]), 1.5);
    }
}
