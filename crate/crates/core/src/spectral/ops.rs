//! Fourier multipliers and the exact linear propagators.

use num_complex::Complex64;

use super::field::{Field, Rep};

/// Multiply the spectrum of `f` by `m(ξ)`; the result keeps the representation of `f`.
pub fn apply_multiplier(f: &Field, mut m: impl FnMut(&[f64]) -> Complex64) -> Field {
    let mut s = f.spectral();
    let grid = *f.grid();
    let data = s.data_mut();
    grid.for_each_wavevector(|i, k| data[i] *= m(k));
    s.set_rep(f.rep());
    s
}

/// Multiply the spectrum by a function of `|ξ|`.
pub fn apply_radial(f: &Field, mut m: impl FnMut(f64) -> Complex64) -> Field {
    apply_multiplier(f, |k| m(k.iter().map(|v| v * v).sum::<f64>().sqrt()))
}

/// Real radial multiplier applied in place to spectral data.
pub fn scale_spectral_radial(f: &mut Field, mut m: impl FnMut(f64) -> f64) {
    debug_assert_eq!(f.rep(), Rep::Spectral);
    let grid = *f.grid();
    let data = f.data_mut();
    grid.for_each_wavevector(|i, k| data[i] *= m(k.iter().map(|v| v * v).sum::<f64>().sqrt()));
}

/// `|ξ|^s` with the zero mode sent to 0 for `s ≠ 0` and passed through for `s = 0`.
pub fn abs_pow_symbol(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        r.powf(s)
    }
}

/// `Δf`.
pub fn laplacian(f: &Field) -> Field {
    apply_radial(f, |r| Complex64::new(-r * r, 0.0))
}

/// `|∇|^s f`.
pub fn abs_grad_pow(f: &Field, s: f64) -> Field {
    apply_radial(f, |r| Complex64::new(abs_pow_symbol(r, s), 0.0))
}

/// `|∇| f`.
pub fn abs_grad(f: &Field) -> Field {
    abs_grad_pow(f, 1.0)
}

/// `⟨∇⟩^s f`.
pub fn bessel_pow(f: &Field, s: f64) -> Field {
    apply_radial(f, |r| Complex64::new((1.0 + r * r).powf(0.5 * s), 0.0))
}

/// `∂_a f`, with the Nyquist mode of the axis removed.
pub fn partial(f: &Field, axis: usize) -> Field {
    let grid = *f.grid();
    let mut s = f.spectral();
    let mut idx = [0usize; 4];
    let d = grid.d();
    for (flat, v) in s.data_mut().iter_mut().enumerate() {
        grid.unravel(flat, &mut idx[..d]);
        *v *= Complex64::new(0.0, grid.derivative_wavenumber(idx[axis]));
    }
    s.set_rep(f.rep());
    s
}

/// `∇f` as one field per axis.
pub fn gradient(f: &Field) -> Vec<Field> {
    (0..f.grid().d()).map(|a| partial(f, a)).collect()
}

/// `e^{itΔ} f`, i.e. the spectral factor `e^{−it|ξ|²}`.
pub fn schrodinger_propagate(f: &Field, t: f64) -> Field {
    apply_radial(f, |r| Complex64::from_polar(1.0, -t * r * r))
}

/// `e^{it|∇|} f`, i.e. the spectral factor `e^{it|ξ|}`.
pub fn wave_propagate(f: &Field, t: f64) -> Field {
    apply_radial(f, |r| Complex64::from_polar(1.0, t * r))
}

/// Zero every mode outside the 2/3-rule range.
pub fn dealias(f: &Field) -> Field {
    let mask = f.grid().dealias_mask();
    let mut s = f.spectral();
    s.data_mut().iter_mut().zip(&mask).for_each(|(v, keep)| {
        if !keep {
            *v = Complex64::default();
        }
    });
    s.set_rep(f.rep());
    s
}
