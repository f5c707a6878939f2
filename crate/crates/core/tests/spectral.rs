mod common;

use common::{max_rel, white_field};
use proptest::prelude::*;
use zlab_core::spectral::{
    decompose_angular, lp_project, schrodinger_propagate, wave_propagate, BandKind, DyadicLadder,
    Field, Grid, ProjKind, SpaceTimeBlock, TemporalMode,
};
use zlab_core::Complex64;

fn grids() -> Vec<Grid> {
    vec![
        Grid::new(2, 32, 2.0 * std::f64::consts::PI).unwrap(),
        Grid::new(4, 16, 16.0).unwrap(),
    ]
}

#[test]
fn littlewood_paley_bands_sum_to_identity() {
    for (i, g) in grids().into_iter().enumerate() {
        let f = white_field(g, 1, i as u32);
        let ladder = DyadicLadder::for_grid(&g);
        let mut acc = Field::zeros(g, f.rep());
        for l in ladder.lambdas() {
            acc = &acc + &lp_project(&f, l, ProjKind::Band).unwrap();
        }
        assert!(max_rel(&f, &acc) < 1e-12, "d = {}", g.d());
    }
}

#[test]
fn projectors_commute_with_propagators() {
    for (i, g) in grids().into_iter().enumerate() {
        let f = white_field(g, 2, i as u32);
        for l in DyadicLadder::for_grid(&g).lambdas() {
            let a = lp_project(&schrodinger_propagate(&f, 0.37), l, ProjKind::Band).unwrap();
            let b = schrodinger_propagate(&lp_project(&f, l, ProjKind::Band).unwrap(), 0.37);
            assert!(max_rel(&a, &b) < 1e-12);
            let a = lp_project(&wave_propagate(&f, -1.3), l, ProjKind::Low).unwrap();
            let b = wave_propagate(&lp_project(&f, l, ProjKind::Low).unwrap(), -1.3);
            assert!(max_rel(&a, &b) < 1e-12);
        }
    }
}

#[test]
fn parseval_with_unnormalised_dft() {
    for (i, g) in grids().into_iter().enumerate() {
        let f = white_field(g, 3, i as u32);
        let phys: f64 = f.physical().data().iter().map(|v| v.norm_sqr()).sum();
        let spec: f64 = f
            .spectral()
            .data()
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            / g.len() as f64;
        assert!((phys - spec).abs() < 1e-12 * phys);
    }
}

#[test]
fn angular_pieces_recombine_to_band() {
    for (i, g) in grids().into_iter().enumerate() {
        let f = white_field(g, 4, i as u32);
        for l in DyadicLadder::for_grid(&g)
            .lambdas()
            .into_iter()
            .filter(|&l| l >= 2.0)
        {
            let pieces = decompose_angular(&f, l).unwrap();
            assert_eq!(pieces.len(), g.d());
            let mut acc = Field::zeros(g, f.rep());
            for p in &pieces {
                acc = &acc + p;
            }
            let band = lp_project(&f, l, ProjKind::Band).unwrap();
            let err = (&acc - &band).l2_norm() / f.l2_norm();
            assert!(err < 1e-12, "λ = {l}: {err}");
        }
    }
}

#[test]
fn propagated_plane_waves_pick_up_exact_phases() {
    let g = Grid::new(2, 32, 8.0).unwrap();
    let m = [3i64, -5];
    let k2: f64 = m.iter().map(|&v| (v as f64 * g.dk()).powi(2)).sum();
    let f = Field::plane_wave(g, &m);
    let t = 0.813;
    let s = schrodinger_propagate(&f, t);
    let w = wave_propagate(&f, t);
    assert!(max_rel(&s, &f.scale(Complex64::from_polar(1.0, -t * k2))) < 1e-12);
    assert!(max_rel(&w, &f.scale(Complex64::from_polar(1.0, t * k2.sqrt()))) < 1e-12);
}

#[test]
fn delta_has_constant_spectrum() {
    let g = Grid::new(2, 16, 4.0).unwrap();
    let mut f = Field::zeros(g, zlab_core::spectral::Rep::Physical);
    f.data_mut()[37] = Complex64::new(1.0, 0.0);
    let s = f.spectral();
    assert!(s.data().iter().all(|v| (v.norm() - 1.0).abs() < 1e-13));
}

#[test]
fn modulation_low_plus_high_is_identity() {
    let g = Grid::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
    let snaps: Vec<Field> = (0..12).map(|k| white_field(g, 5, k)).collect();
    let b = SpaceTimeBlock::from_snapshots(0.0, 0.01, &snaps).unwrap();
    for mode in [TemporalMode::ZeroPad, TemporalMode::Periodic] {
        for l in [1.0, 4.0, 64.0] {
            let lo = b.modulation_project(l, BandKind::Low, mode).unwrap();
            let hi = b.modulation_project(l, BandKind::High, mode).unwrap();
            let sum = lo.axpy(Complex64::new(1.0, 0.0), &hi).unwrap();
            let err = sum
                .data()
                .iter()
                .zip(b.data())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "{mode:?} λ = {l}: {err}");
        }
    }
}

#[test]
fn free_schrodinger_block_has_small_modulation() {
    // a periodic free solution sits exactly on the paraboloid
    let g = Grid::new(1, 16, 2.0 * std::f64::consts::PI).unwrap();
    let f = Field::plane_wave(g, &[2]);
    let m = 32;
    let dt = 2.0 * std::f64::consts::PI / (4.0 * m as f64);
    let b = SpaceTimeBlock::free_schrodinger(&f, 0.0, dt, m).unwrap();
    let hi = b
        .modulation_project(0.5, BandKind::High, TemporalMode::Periodic)
        .unwrap();
    assert!(hi.l2_l2() < 1e-10 * b.l2_l2());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projections_are_linear(seed in 0u64..1000, a in -3.0f64..3.0, band in 0usize..4) {
        let g = Grid::new(2, 16, 5.0).unwrap();
        let f = white_field(g, seed, 0);
        let h = white_field(g, seed, 1);
        let lambdas = DyadicLadder::for_grid(&g).lambdas();
        let l = lambdas[band.min(lambdas.len() - 1)];
        let lhs = lp_project(&f.axpy(Complex64::new(a, 0.0), &h).unwrap(), l, ProjKind::Band).unwrap();
        let rhs = lp_project(&f, l, ProjKind::Band)
            .unwrap()
            .axpy(Complex64::new(a, 0.0), &lp_project(&h, l, ProjKind::Band).unwrap())
            .unwrap();
        prop_assert!((&lhs - &rhs).l2_norm() <= 1e-12 * (f.l2_norm() + a.abs() * h.l2_norm()));
    }

    #[test]
    fn propagators_are_unitary(seed in 0u64..1000, t in -5.0f64..5.0) {
        let g = Grid::new(2, 16, 5.0).unwrap();
        let f = white_field(g, seed, 2);
        let n0 = f.l2_norm();
        prop_assert!((schrodinger_propagate(&f, t).l2_norm() - n0).abs() < 1e-12 * n0);
        prop_assert!((wave_propagate(&f, t).l2_norm() - n0).abs() < 1e-12 * n0);
        let back = schrodinger_propagate(&schrodinger_propagate(&f, t), -t);
        prop_assert!((&back - &f).l2_norm() < 1e-12 * n0);
    }
}
