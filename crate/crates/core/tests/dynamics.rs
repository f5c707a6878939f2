mod common;

use common::gaussian_bump;
use zlab_core::dynamics::{
    detect_blowup, glue, integrate, refined_restart, restart_inverse, scattering_probe, to_direct,
    to_rescaled, Diagnostics, Frame, Outcome, RunSpec, Scheme, Stepper, Thresholds, ZakharovState,
};
use zlab_core::noise::{NoiseKey, NoiseModel, NoisePath, NoisePreset};
use zlab_core::spectral::{self, Field, Grid, Rep};

fn grid() -> Grid {
    Grid::new(2, 32, 16.0).unwrap()
}

fn conservative() -> NoisePreset {
    NoisePreset::Conservative {
        modes: 3,
        amplitude: 0.5,
        width: 1.0,
        wave_modes: 2,
        wave_amplitude: 0.5,
    }
}

fn initial(g: Grid) -> ZakharovState {
    ZakharovState::direct(gaussian_bump(g, 1.0, 1.5), gaussian_bump(g, -0.5, 2.0)).unwrap()
}

fn path_for(model: &NoiseModel, seed: u64, dt: f64, steps: usize) -> NoisePath {
    NoisePath::generate(
        NoiseKey::new(seed, 0),
        dt,
        steps,
        model.modes1().len(),
        model.modes2().len(),
    )
    .unwrap()
}

#[test]
fn zero_data_stays_zero() {
    let g = grid();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let path = path_for(&model, 1, 0.01, 50);
    let zero = ZakharovState::direct(
        Field::zeros(g, Rep::Physical),
        Field::zeros(g, Rep::Physical),
    )
    .unwrap();
    let mut spec = RunSpec::new(0.01, 50);
    spec.checkpoint_every = 10;
    let tr = integrate(&zero, &model, &path, &spec).unwrap();
    // the wave noise forces Y, so only X is required to stay at zero
    assert!(tr.checkpoints.iter().all(|s| s.x.max_abs() == 0.0));
    let det = NoiseModel::build(g, &NoisePreset::None).unwrap();
    let tr = integrate(&zero, &det, &NoisePath::empty(0.01, 50), &spec).unwrap();
    assert!(tr
        .checkpoints
        .iter()
        .all(|s| s.x.max_abs() == 0.0 && s.y.max_abs() == 0.0));
}

#[test]
fn uncoupled_noise_free_flow_is_exact() {
    let g = grid();
    let model = NoiseModel::build(g, &NoisePreset::None).unwrap();
    let st = initial(g);
    let (dt, steps) = (0.01, 40);
    let mut spec = RunSpec::new(dt, steps);
    spec.coupling = false;
    let tr = integrate(&st, &model, &NoisePath::empty(dt, steps), &spec).unwrap();
    let t = dt * steps as f64;
    let x = spectral::schrodinger_propagate(&st.x, t);
    let y = spectral::wave_propagate(&st.y, t);
    let fin = tr.final_state();
    assert!((&fin.x - &x).l2_norm() < 1e-12 * x.l2_norm());
    assert!((&fin.y - &y).l2_norm() < 1e-12 * y.l2_norm());
}

#[test]
fn conservative_noise_preserves_mass_per_step() {
    let g = grid();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let dt = 1e-3;
    let path = path_for(&model, 2, dt, 20);
    let stepper = Stepper::new(g, dt, &model).unwrap();
    let st = initial(g);
    let (mut x, mut y) = (st.x.spectral(), st.y.spectral());
    let m0 = x.l2_norm_sq();
    for s in 0..20 {
        let before = x.l2_norm_sq();
        stepper.direct_step(&mut x, &mut y, &model, &path, s);
        assert!((x.l2_norm_sq() - before).abs() <= 1e-10 * m0);
    }
}

#[test]
fn zero_coefficient_nonconservative_model_is_deterministic() {
    let g = grid();
    let noisy = NoiseModel::build(g, &NoisePreset::Nonconservative { c: 0.0 }).unwrap();
    let det = NoiseModel::build(g, &NoisePreset::None).unwrap();
    let (dt, steps) = (0.01, 30);
    let st = initial(g);
    let spec = RunSpec::new(dt, steps);
    let a = integrate(&st, &noisy, &path_for(&noisy, 3, dt, steps), &spec).unwrap();
    let b = integrate(&st, &det, &NoisePath::empty(dt, steps), &spec).unwrap();
    assert!(a.final_state().distance(b.final_state()) < 1e-12 * b.final_state().energy_norm());
}

#[test]
fn frame_round_trip_is_identity() {
    let g = grid();
    for preset in [conservative(), NoisePreset::Nonconservative { c: 1.0 }] {
        let model = NoiseModel::build(g, &preset).unwrap();
        let path = path_for(&model, 4, 0.01, 100);
        let mut st = initial(g);
        st.t = 0.63;
        let r = to_rescaled(&st, &model, &path).unwrap();
        assert_ne!(r.frame, Frame::Direct);
        let back = to_direct(&r, &model, &path).unwrap();
        assert!(back.distance(&st) <= 1e-12 * st.energy_norm());
        // at t = 0 the transform is trivial
        let r0 = to_rescaled(&initial(g), &model, &path).unwrap();
        assert!((&r0.x - &st.x).l2_norm() < 1e-15 && (&r0.y - &st.y).l2_norm() < 1e-15);
    }
}

#[test]
fn refined_restart_then_inverse_is_identity() {
    let g = grid();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let path = path_for(&model, 5, 0.01, 100);
    let sigma = 0.4;
    let mut st = initial(g);
    st.t = sigma;
    let r = to_rescaled(&st, &model, &path).unwrap();
    let (local, incr) = refined_restart(&r, sigma, &model, &path).unwrap();
    assert_eq!(local.t, 0.0);
    assert_eq!(incr.steps(), 60);
    let back = restart_inverse(&local, sigma, &model, &path).unwrap();
    assert!(back.distance(&r) <= 1e-12 * r.energy_norm());
    // σ = 0: the restart is the plain rescaling map
    let r0 = to_rescaled(&initial(g), &model, &path).unwrap();
    let (l0, _) = refined_restart(&r0, 0.0, &model, &path).unwrap();
    assert!(l0.distance(&r0) < 1e-15);
}

#[test]
fn glued_restart_matches_uninterrupted_run() {
    let g = grid();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let (dt, steps) = (0.01, 60);
    let path = path_for(&model, 6, dt, steps);
    let st = initial(g);
    let mut spec = RunSpec::new(dt, steps);
    spec.checkpoint_every = 10;
    let full = integrate(&st, &model, &path, &spec).unwrap();

    let sigma = 0.3;
    let mut head_spec = spec;
    head_spec.steps = 30;
    let head = integrate(&st, &model, &path, &head_spec).unwrap();
    let at_sigma = to_rescaled(head.final_state(), &model, &path).unwrap();
    let (local, incr) = refined_restart(&at_sigma, sigma, &model, &path).unwrap();
    let start = to_direct(&local, &model, &incr).unwrap();
    let mut tail_spec = spec;
    tail_spec.steps = 30;
    let tail = integrate(&start, &model, &incr, &tail_spec).unwrap();
    let (glued, jump) = glue(&head, &tail, sigma).unwrap();
    assert!(jump <= 1e-10 * st.energy_norm(), "jump {jump}");
    assert_eq!(
        glued.checkpoint_times().len(),
        full.checkpoint_times().len()
    );
    let d = glued.final_state().distance(full.final_state());
    assert!(d <= 1e-10 * full.final_state().energy_norm(), "{d}");
}

#[test]
fn non_finite_diagnostics_flag_blowup() {
    let mut d = Diagnostics::default();
    for (i, v) in [1.0, 2.0, f64::NAN, 3.0].into_iter().enumerate() {
        d.t.push(i as f64 * 0.1);
        d.mass.push(1.0);
        d.energy.push(0.0);
        d.h1_x.push(v);
        d.l2_y.push(0.0);
        d.d_accum.push(0.0);
    }
    assert_eq!(
        detect_blowup(&d, 1.0, 0.3, &Thresholds::default()),
        Outcome::Blowup { t: 0.2 }
    );
    d.h1_x[2] = 5e3;
    assert_eq!(
        detect_blowup(&d, 1.0, 0.3, &Thresholds::default()),
        Outcome::Blowup { t: 0.2 }
    );
    d.h1_x[2] = 2.0;
    assert_eq!(
        detect_blowup(&d, 1.0, 0.3, &Thresholds::default()),
        Outcome::Global
    );
    assert_eq!(
        detect_blowup(&d, 1.0, 1.0, &Thresholds::default()),
        Outcome::Undecided
    );
}

#[test]
fn non_finite_state_stops_integration() {
    let g = grid();
    let model = NoiseModel::build(g, &NoisePreset::None).unwrap();
    let mut x = gaussian_bump(g, 1.0, 1.5);
    x.data_mut()[5].re = f64::NAN;
    let st = ZakharovState::direct(x, Field::zeros(g, Rep::Physical)).unwrap();
    let mut spec = RunSpec::new(0.01, 20);
    spec.diag_every = 5;
    let tr = integrate(&st, &model, &NoisePath::empty(0.01, 20), &spec).unwrap();
    assert_eq!(tr.outcome, Outcome::Blowup { t: 0.0 });
}

#[test]
fn accumulated_d_norm_is_nondecreasing() {
    let g = grid();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let (dt, steps) = (0.005, 200);
    let tr = integrate(
        &initial(g),
        &model,
        &path_for(&model, 7, dt, steps),
        &RunSpec::new(dt, steps),
    )
    .unwrap();
    let d = &tr.diagnostics.d_accum;
    assert_eq!(d.len(), steps + 1);
    assert!(d.windows(2).all(|w| w[1] >= w[0]));
    assert!(d[steps] > 0.0);
}

#[test]
fn sub_threshold_deterministic_run_is_global() {
    let g = Grid::new(4, 8, 12.0).unwrap();
    let model = NoiseModel::build(g, &NoisePreset::None).unwrap();
    let st =
        ZakharovState::direct(gaussian_bump(g, 0.3, 1.5), Field::zeros(g, Rep::Physical)).unwrap();
    let (dt, steps) = (0.02, 100);
    let mut spec = RunSpec::new(dt, steps);
    spec.diag_every = 10;
    let tr = integrate(&st, &model, &NoisePath::empty(dt, steps), &spec).unwrap();
    assert_eq!(tr.outcome, Outcome::Global);
}

#[test]
fn free_flow_profiles_are_constant() {
    let g = grid();
    let model = NoiseModel::build(g, &NoisePreset::None).unwrap();
    let (dt, steps) = (0.02, 50);
    let mut spec = RunSpec::new(dt, steps);
    spec.coupling = false;
    spec.checkpoint_every = 5;
    let path = NoisePath::empty(dt, steps);
    let tr = integrate(&initial(g), &model, &path, &spec).unwrap();
    let rep = scattering_probe(&tr, &model, &path, &[0.8, 0.9, 1.0], 1e-10).unwrap();
    assert!(rep.summary.scatters);
    assert!(rep.summary.max_rel_diff < 1e-12);
}

#[test]
fn rescaled_scheme_tracks_direct_scheme() {
    let g = grid();
    let model = NoiseModel::build(g, &conservative()).unwrap();
    let mut discrepancies = Vec::new();
    let fine = path_for(&model, 8, 0.0025, 400);
    for factor in [4, 2, 1] {
        let path = fine.coarsen(factor).unwrap();
        let mut spec = RunSpec::new(path.dt(), path.steps());
        let a = integrate(&initial(g), &model, &path, &spec).unwrap();
        spec.scheme = Scheme::Rescaled;
        let b = integrate(&initial(g), &model, &path, &spec).unwrap();
        discrepancies.push((&a.final_state().x - &b.final_state().x).h1_norm());
    }
    assert!(
        discrepancies[0] > discrepancies[1] && discrepancies[1] > discrepancies[2],
        "{discrepancies:?}"
    );
}

fn energy_drift(st: &ZakharovState, dt: f64) -> f64 {
    let model = NoiseModel::build(*st.grid(), &NoisePreset::None).unwrap();
    let steps = (0.5 / dt).round() as usize;
    let mut spec = RunSpec::new(dt, steps);
    spec.diag_every = steps / 10;
    let e = integrate(st, &model, &NoisePath::empty(dt, steps), &spec)
        .unwrap()
        .diagnostics
        .energy;
    e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max) / e[0].abs()
}

#[test]
fn energy_drift_is_second_order_once_the_wave_is_dealiased() {
    // a 2π box cuts the bumps off non-smoothly, so Y has content past the 2/3 range
    let g = Grid::new(2, 32, 2.0 * std::f64::consts::PI).unwrap();
    let raw = initial(g);
    let st = ZakharovState::direct(raw.x.clone(), spectral::dealias(&raw.y)).unwrap();
    let (a, b) = (energy_drift(&st, 1e-3), energy_drift(&st, 5e-4));
    assert!((a / b - 4.0).abs() < 0.4, "{a} → {b}");
    // without the truncation a dt-independent floor remains
    let (a, b) = (energy_drift(&raw, 1e-3), energy_drift(&raw, 5e-4));
    assert!(a / b < 2.0, "{a} → {b}");
}
