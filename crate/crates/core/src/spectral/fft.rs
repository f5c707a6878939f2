//! Multi-dimensional FFTs over row-major arrays.
//!
//! Plans come from a per-thread [`FftPlanner`], so concurrent callers never
//! share working buffers.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, dir))
}

/// Unnormalised transform of `data` (shape `shape`, row-major) along `axis`.
pub fn fft_axis(data: &mut [Complex64], shape: &[usize], axis: usize, dir: FftDirection) {
    let len = shape[axis];
    debug_assert_eq!(data.len(), shape.iter().product::<usize>());
    if len <= 1 {
        return;
    }
    let fft = plan(len, dir);
    let inner: usize = shape[axis + 1..].iter().product();
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    if inner == 1 {
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    let outer: usize = shape[..axis].iter().product();
    let block = len * inner;
    // Gather every line of this axis into a contiguous buffer, transform the
    // batch in one call, scatter back.
    let mut buf = vec![Complex64::default(); data.len()];
    for o in 0..outer {
        let base = o * block;
        for i in 0..inner {
            let line = (o * inner + i) * len;
            for k in 0..len {
                buf[line + k] = data[base + k * inner + i];
            }
        }
    }
    fft.process_with_scratch(&mut buf, &mut scratch);
    for o in 0..outer {
        let base = o * block;
        for i in 0..inner {
            let line = (o * inner + i) * len;
            for k in 0..len {
                data[base + k * inner + i] = buf[line + k];
            }
        }
    }
}

/// Unnormalised forward transform over all axes (`e^{-ikx}` kernel).
pub fn forward(data: &mut [Complex64], shape: &[usize]) {
    for a in 0..shape.len() {
        fft_axis(data, shape, a, FftDirection::Forward);
    }
}

/// Normalised inverse of [`forward`].
pub fn inverse(data: &mut [Complex64], shape: &[usize]) {
    for a in 0..shape.len() {
        fft_axis(data, shape, a, FftDirection::Inverse);
    }
    let s = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|v| *v *= s);
}
