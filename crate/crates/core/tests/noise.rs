mod common;

use common::gaussian_bump;
use zlab_core::noise::{geometric_bm, NoiseKey, NoiseModel, NoisePath, NoisePreset};
use zlab_core::spectral::{self, Field, Grid};
use zlab_core::Complex64;

fn conservative() -> NoisePreset {
    NoisePreset::Conservative {
        modes: 3,
        amplitude: 0.5,
        width: 1.0,
        wave_modes: 2,
        wave_amplitude: 0.5,
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn identical_keys_give_bit_identical_paths_and_fields() {
    let g = Grid::new(2, 16, 8.0).unwrap();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let a = NoisePath::generate(NoiseKey::new(9, 4), 0.01, 50, 3, 2).unwrap();
    let b = NoisePath::generate(NoiseKey::new(9, 4), 0.01, 50, 3, 2).unwrap();
    assert_eq!(a, b);
    let wa = model.w1_field(&a, 0.3).unwrap();
    let wb = model.w1_field(&b, 0.3).unwrap();
    assert_eq!(wa.data(), wb.data());
    let c = NoisePath::generate(NoiseKey::new(9, 5), 0.01, 50, 3, 2).unwrap();
    assert_ne!(a, c);
}

#[test]
fn brownian_variance_at_one() {
    let m = 10_000;
    let xs: Vec<f64> = (0..m)
        .map(|i| {
            let p = NoisePath::generate(NoiseKey::new(21, i), 0.1, 10, 1, 0).unwrap();
            p.brownian_value(1, 0, 1.0).unwrap()
        })
        .collect();
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let (var, se) = mean_se(&sq);
    assert!((var - 1.0).abs() <= 3.0 * se, "var {var} ± {se}");
    assert_eq!(
        NoisePath::generate(NoiseKey::new(21, 0), 0.1, 10, 1, 0)
            .unwrap()
            .beta_at(1, 0, 0),
        0.0
    );
}

#[test]
fn geometric_bm_mean_is_one() {
    let m = 10_000;
    for (c, t) in [(1.0, 1.0), (0.5, 2.0)] {
        let xs: Vec<f64> = (0..m)
            .map(|i| {
                let p = NoisePath::generate(NoiseKey::new(22, i), 0.25, 8, 1, 0).unwrap();
                geometric_bm(&p, c, t).unwrap()
            })
            .collect();
        let (mean, se) = mean_se(&xs);
        assert!((mean - 1.0).abs() <= 3.0 * se, "c = {c}: {mean} ± {se}");
    }
    let p = NoisePath::generate(NoiseKey::new(22, 0), 0.25, 8, 1, 0).unwrap();
    assert_eq!(geometric_bm(&p, 1.0, 0.0).unwrap(), 1.0);
    assert_eq!(geometric_bm(&p, 0.0, 1.5).unwrap(), 1.0);
}

#[test]
fn conservative_noise_is_imaginary_and_hypotheses_finite() {
    let g = Grid::new(2, 32, 16.0).unwrap();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    assert!(model.is_conservative());
    assert!(model.hypothesis_report().is_finite());
    let p = NoisePath::generate(NoiseKey::new(1, 0), 0.01, 100, 3, 2).unwrap();
    let w = model.w1_field(&p, 0.7).unwrap();
    assert!(w.data().iter().all(|v| v.re == 0.0));
    assert!(w.l2_norm() > 0.0);
}

#[test]
fn convolution_single_step_is_one_quadrature_term() {
    let g = Grid::new(2, 16, 8.0).unwrap();
    let phi = gaussian_bump(g, 0.7, 1.2);
    let model = NoiseModel::custom(g, vec![], vec![phi.clone()]).unwrap();
    let dt = 0.05;
    let p = NoisePath::generate(NoiseKey::new(2, 0), dt, 1, 0, 1).unwrap();
    let db = p.increment(2, 0, 0);
    let got = model.stochastic_convolution(&p, dt).unwrap();
    // W₂ = iφΔβ over the step, so −i·ΔW₂ = φΔβ
    let dw2 = phi.scale(Complex64::new(0.0, db));
    let want = spectral::wave_propagate(&dw2.scale(Complex64::new(0.0, -1.0)), dt);
    let err = (&got - &want).l2_norm() / want.l2_norm();
    assert!(err <= 1e-12, "{err}");
}

#[test]
fn convolution_without_wave_noise_vanishes() {
    let g = Grid::new(2, 16, 8.0).unwrap();
    let model = NoiseModel::build(g, &NoisePreset::Nonconservative { c: 1.0 }).unwrap();
    let p = NoisePath::generate(NoiseKey::new(2, 0), 0.1, 10, 1, 0).unwrap();
    assert_eq!(
        model.stochastic_convolution(&p, 1.0).unwrap().max_abs(),
        0.0
    );
}

#[test]
fn convolution_splits_at_restart_time() {
    let g = Grid::new(2, 16, 8.0).unwrap();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let dt = 0.02;
    let p = NoisePath::generate(NoiseKey::new(3, 1), dt, 60, 3, 2).unwrap();
    let sigma = 20.0 * dt;
    let t = 30.0 * dt;
    let full = model.stochastic_convolution(&p, sigma + t).unwrap();
    let head = spectral::wave_propagate(&model.stochastic_convolution(&p, sigma).unwrap(), t);
    let tail = model
        .stochastic_convolution(&p.restart(sigma).unwrap(), t)
        .unwrap();
    let sum = &head.physical() + &tail;
    assert!((&full - &sum).l2_norm() <= 1e-12 * full.l2_norm());
}

#[test]
fn restart_and_concat_reproduce_increments() {
    let p = NoisePath::generate(NoiseKey::new(4, 2), 0.01, 80, 2, 2).unwrap();
    let head = p.window(0, 35).unwrap();
    let tail = p.restart(0.35).unwrap();
    let joined = head.concat(&tail).unwrap();
    for j in 1..=2 {
        for k in 0..2 {
            assert_eq!(joined.increments(j, k), p.increments(j, k));
        }
    }
}

#[test]
fn lower_order_coefficients_match_conjugated_laplacian() {
    let g = Grid::new(2, 64, 16.0).unwrap();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let p = NoisePath::generate(NoiseKey::new(5, 0), 0.01, 100, 3, 2).unwrap();
    let t = 1.0;
    let w1 = model.w1_field(&p, t).unwrap();
    let coeffs = model.lower_order_coeffs(&p, t).unwrap();
    let u = zlab_core::norms::sweep::random_field(g, NoiseKey::new(5, 1), 0, 2.0).physical();
    let eu = w1.zip_map(&u, |w, x| w.exp() * x).unwrap();
    let lhs = w1
        .zip_map(&spectral::laplacian(&eu).physical(), |w, x| (-w).exp() * x)
        .unwrap();
    let rhs = &spectral::laplacian(&u).physical() + &coeffs.apply(&u);
    let err = (&lhs - &rhs).l2_norm() / spectral::laplacian(&u).l2_norm();
    assert!(err < 1e-8, "{err}");
}

#[test]
fn constant_mode_has_no_lower_order_terms() {
    let g = Grid::new(2, 16, 8.0).unwrap();
    let model = NoiseModel::build(g, &NoisePreset::Nonconservative { c: 2.0 }).unwrap();
    let p = NoisePath::generate(NoiseKey::new(6, 0), 0.1, 10, 1, 0).unwrap();
    let c = model.lower_order_coeffs(&p, 0.5).unwrap();
    let tiny = |f: &Field| f.max_abs() < 1e-12;
    assert!(c.b.iter().all(tiny) && tiny(&c.c));
}
