#![allow(dead_code)]

use zlab_core::noise::{NoiseKey, Process};
use zlab_core::spectral::{Field, Grid};
use zlab_core::Complex64;

/// Complex white-noise field drawn from the auxiliary stream `tag`.
pub fn white_field(grid: Grid, seed: u64, tag: u32) -> Field {
    let mut s = NoiseKey::new(seed, 0).stream(Process::Aux, tag, 0);
    Field::from_fn(grid, |_| Complex64::new(s.next_normal(), s.next_normal()))
}

/// Real white-noise field.
pub fn real_white_field(grid: Grid, seed: u64, tag: u32) -> Field {
    let mut s = NoiseKey::new(seed, 0).stream(Process::Aux, tag, 0);
    Field::from_real_fn(grid, |_| s.next_normal())
}

pub fn gaussian_bump(grid: Grid, amplitude: f64, width: f64) -> Field {
    Field::from_real_fn(grid, |x| {
        amplitude * (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp()
    })
}

/// Largest pointwise difference relative to the largest entry of `a`.
pub fn max_rel(a: &Field, b: &Field) -> f64 {
    let pa = a.physical();
    let pb = b.physical();
    let scale = pa.max_abs().max(f64::MIN_POSITIVE);
    pa.data()
        .iter()
        .zip(pb.data())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

pub fn normals(seed: u64, tag: u32, n: usize) -> Vec<f64> {
    let mut s = NoiseKey::new(seed, 1).stream(Process::Aux, tag, 0);
    (0..n).map(|_| s.next_normal()).collect()
}
