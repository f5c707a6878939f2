mod common;

use common::normals;
use proptest::prelude::*;
use zlab_core::noise::{NoiseKey, NoisePath};
use zlab_core::spectral::TemporalMode;
use zlab_core::variation::{
    besov_time_norm, embedding_ratio, gbm_path, hoelder_norm, interpolation_ratio, median,
    p_variation, p_variation_sum, temporal_bands, vp_norm, BesovOptions, SampledPath,
};

/// Largest `Σ|x_{i+1} − x_i|^p` over every subsequence of the samples.
fn brute_force(x: &[f64], p: f64) -> f64 {
    let n = x.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let mut s = 0.0;
        let mut prev: Option<f64> = None;
        for (i, &v) in x.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if let Some(u) = prev {
                    s += (v - u).abs().powf(p);
                }
                prev = Some(v);
            }
        }
        best = best.max(s);
    }
    best
}

fn brownian(seed: u64, dt: f64, steps: usize) -> SampledPath {
    let p = NoisePath::generate(NoiseKey::new(seed, 0), dt, steps, 1, 0).unwrap();
    SampledPath::uniform(0.0, dt, p.betas(1, 0)).unwrap()
}

fn coarsened(fine: &NoisePath, factor: usize) -> SampledPath {
    let p = fine.coarsen(factor).unwrap();
    SampledPath::uniform(0.0, p.dt(), p.betas(1, 0)).unwrap()
}

fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (
        lx.iter().sum::<f64>() / x.len() as f64,
        ly.iter().sum::<f64>() / y.len() as f64,
    );
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

#[test]
fn dp_matches_brute_force_on_small_paths() {
    for trial in 0..60u32 {
        let n = 2 + (trial as usize % 10);
        let x = normals(31, trial, n);
        let path = SampledPath::uniform(0.0, 0.1, &x).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert_eq!(
                p_variation_sum(&path, p).unwrap(),
                brute_force(&x, p),
                "trial {trial}, p = {p}"
            );
        }
    }
}

#[test]
fn invalid_exponent_is_rejected() {
    let path = SampledPath::uniform(0.0, 1.0, &[0.0, 1.0]).unwrap();
    assert!(p_variation(&path, 0.5).is_err());
    assert!(hoelder_norm(&path, 1.5, None).is_err());
}

#[test]
fn vp_norm_equals_variation_for_paths_ending_at_zero() {
    let mut x = normals(32, 0, 40);
    *x.last_mut().unwrap() = 0.0;
    let path = SampledPath::uniform(0.0, 0.1, &x).unwrap();
    for p in [1.0, 2.0, 3.0] {
        let a = vp_norm(&path, p).unwrap();
        let b = p_variation(&path, p).unwrap();
        assert!((a - b).abs() <= 1e-13 * b, "p = {p}: {a} vs {b}");
    }
}

#[test]
fn brownian_variation_diverges_below_two_and_settles_above() {
    // one path on dt = 1e-3/16, read at dt = 1e-3, 1e-3/4, 1e-3/16
    let fine = NoisePath::generate(NoiseKey::new(33, 0), 1e-3 / 16.0, 16_000, 1, 0).unwrap();
    let levels = [16usize, 4, 1];
    let n: Vec<f64> = levels.iter().map(|f| (16_000 / f) as f64).collect();
    let v15: Vec<f64> = levels
        .iter()
        .map(|&f| p_variation(&coarsened(&fine, f), 1.5).unwrap())
        .collect();
    let v3: Vec<f64> = levels
        .iter()
        .map(|&f| p_variation(&coarsened(&fine, f), 3.0).unwrap())
        .collect();
    assert!(v3.iter().all(|v| v.is_finite()));
    // |β|_{V^p} over an N-point mesh grows like N^{1/p − 1/2} for p < 2
    assert!(v15.windows(2).all(|w| w[1] > w[0]), "{v15:?}");
    let s15 = loglog_slope(&n, &v15);
    assert!((s15 - 1.0 / 6.0).abs() < 0.08, "slope {s15}");
    let s3 = loglog_slope(&n, &v3);
    assert!(s3 < 0.5 * s15, "p = 3 slope {s3} vs p = 1.5 slope {s15}");
}

#[test]
fn hoelder_norm_of_linear_path_is_its_slope() {
    let x: Vec<f64> = (0..=20).map(|k| -2.5 * k as f64 / 20.0).collect();
    let path = SampledPath::uniform(0.0, 0.05, &x).unwrap();
    for alpha in [1.0 / 3.0, 0.55, 1.0] {
        assert!((hoelder_norm(&path, alpha, None).unwrap() - 2.5).abs() < 1e-12);
    }
    let sub = hoelder_norm(&path, 1.0, Some((0.2, 0.6))).unwrap();
    assert!((sub - 2.5).abs() < 1e-12);
}

#[test]
fn hoelder_statistic_grows_under_refinement_above_one_half() {
    let mut r55 = Vec::new();
    let mut r33 = Vec::new();
    for seed in 0..10 {
        let fine = NoisePath::generate(NoiseKey::new(34, seed), 1.0 / 2048.0, 2048, 1, 0).unwrap();
        let coarse = coarsened(&fine, 32);
        let full = coarsened(&fine, 1);
        r55.push(
            hoelder_norm(&full, 0.55, None).unwrap() / hoelder_norm(&coarse, 0.55, None).unwrap(),
        );
        r33.push(
            hoelder_norm(&full, 1.0 / 3.0, None).unwrap()
                / hoelder_norm(&coarse, 1.0 / 3.0, None).unwrap(),
        );
    }
    let (m55, m33) = (median(&r55), median(&r33));
    assert!(m55 > 1.2, "α = 0.55 refinement ratio {m55}");
    assert!(m55 > m33, "{m55} vs {m33}");
}

#[test]
fn expected_hoelder_norm_is_flat_over_unit_windows() {
    let (dt, paths) = (0.01, 500);
    let mut means = vec![0.0; 10];
    for i in 0..paths {
        let b = brownian(35_000 + i as u64, dt, 1000);
        for (n, m) in means.iter_mut().enumerate() {
            *m += hoelder_norm(&b, 1.0 / 3.0, Some((n as f64, n as f64 + 1.0))).unwrap()
                / paths as f64;
        }
    }
    let lo = means.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = means.iter().cloned().fold(0.0, f64::max);
    let avg = means.iter().sum::<f64>() / means.len() as f64;
    assert!((hi - lo) / avg < 0.2, "{means:?}");
}

#[test]
fn ramp_prefix_contributes_exactly_one() {
    let (h, _) = gbm_path(NoiseKey::new(36, 0), 1.0, 0.01, 2.0).unwrap();
    let ext = h.with_ramp_prefix(1.0).unwrap();
    assert_eq!(ext.values()[0].norm(), 0.0);
    assert!((ext.start() + 1.0).abs() < 1e-12);
    let prefix = ext.restrict(-1.0, 0.0).unwrap();
    assert!((p_variation(&prefix, 3.0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn constant_signal_lives_in_the_low_block() {
    let path = SampledPath::uniform(0.0, 0.01, &[1.5; 256]).unwrap();
    let o = BesovOptions {
        dt: None,
        taper: None,
        mode: TemporalMode::Periodic,
    };
    let bands = temporal_bands(&path, 6.0, &o).unwrap();
    let window: f64 = 256.0 * 0.01;
    let low = 1.5 * window.powf(1.0 / 6.0);
    assert!((bands[0].1 - low).abs() < 1e-12 * low);
    assert!(bands[1..].iter().all(|(_, v)| *v < 1e-12), "{bands:?}");
    let b = besov_time_norm(&path, 0.125, 6.0, f64::INFINITY, &o).unwrap();
    assert!((b - low).abs() < 1e-12 * low);
}

#[test]
fn interpolation_and_embedding_ratios_stay_bounded() {
    let mut interp = Vec::new();
    let mut embed = Vec::new();
    for i in 0..200 {
        let (h, _) = gbm_path(NoiseKey::new(37, i), 1.0, 0.01, 5.0).unwrap();
        let h = h.with_ramp_prefix(1.0).unwrap();
        interp.push(interpolation_ratio(&h).unwrap());
        embed.push(embedding_ratio(&h).unwrap());
    }
    for (name, v) in [("interpolation", &interp), ("embedding", &embed)] {
        let max = v.iter().cloned().fold(0.0, f64::max);
        assert!(max.is_finite() && max > 0.0);
        assert!(
            max <= 10.0 * median(v),
            "{name}: max {max}, median {}",
            median(v)
        );
    }
}

fn path_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2..40)
}

proptest! {
    #[test]
    fn variation_scales_with_amplitude(x in path_strategy(), a in -5.0f64..5.0, p in 1.0f64..4.0) {
        let path = SampledPath::uniform(0.0, 1.0, &x).unwrap();
        let v = p_variation(&path, p).unwrap();
        let w = p_variation(&path.scale(a), p).unwrap();
        prop_assert!((w - a.abs() * v).abs() <= 1e-10 * (1.0 + a.abs() * v));
    }

    #[test]
    fn variation_is_nonincreasing_in_p_for_small_increments(x in path_strategy(), p in 1.0f64..4.0, dp in 0.0f64..2.0) {
        // values in [−½, ½], so every partition increment is at most 1
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v).collect();
        let path = SampledPath::uniform(0.0, 1.0, &y).unwrap();
        let a = p_variation_sum(&path, p).unwrap();
        let b = p_variation_sum(&path, p + dp).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
        prop_assert!(p_variation(&path, p + dp).unwrap() <= p_variation(&path, p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn adding_samples_never_decreases_the_variation(x in path_strategy(), keep in prop::collection::vec(any::<bool>(), 40), p in 1.0f64..4.0) {
        let full = SampledPath::uniform(0.0, 1.0, &x).unwrap();
        let (times, values): (Vec<f64>, Vec<f64>) = x
            .iter()
            .enumerate()
            .filter(|(i, _)| *i == 0 || *i == x.len() - 1 || keep[*i])
            .map(|(i, v)| (i as f64, *v))
            .unzip();
        let sub = SampledPath::from_real(times, &values).unwrap();
        prop_assert!(p_variation_sum(&sub, p).unwrap() <= p_variation_sum(&full, p).unwrap() * (1.0 + 1e-12));
    }
}
