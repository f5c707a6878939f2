//! Lateral Strichartz norms `L^{p,q}_e`: an outer norm along one coordinate
//! axis of an inner norm over time and the transverse coordinates.

use crate::spectral::SpaceTimeBlock;

/// `‖f‖_{L^{p,q}_e}` with `e` the coordinate axis `axis`; `p`, `q` may be infinite.
pub fn lateral_norm(block: &SpaceTimeBlock, axis: usize, p: f64, q: f64) -> f64 {
    let g = block.grid();
    let (d, n) = (g.d(), g.n());
    assert!(axis < d, "axis {axis} out of range for d = {d}");
    let stride = g.stride(axis);
    let transverse_measure = block.dt() * g.dx().powi(d as i32 - 1);

    // inner[r] = Σ_{t,y} |f(t, r e + y)|^q (or the max for q = ∞)
    let mut inner = vec![0.0f64; n];
    for k in 0..block.len() {
        for (i, v) in block.slice(k).iter().enumerate() {
            let r = (i / stride) % n;
            let a = v.norm();
            if q.is_infinite() {
                inner[r] = inner[r].max(a);
            } else {
                inner[r] += a.powf(q);
            }
        }
    }
    let inner: Vec<f64> = if q.is_infinite() {
        inner
    } else {
        inner
            .into_iter()
            .map(|s| (s * transverse_measure).powf(1.0 / q))
            .collect()
    };
    if p.is_infinite() {
        inner.into_iter().fold(0.0, f64::max)
    } else {
        (inner.iter().map(|v| v.powf(p)).sum::<f64>() * g.dx()).powf(1.0 / p)
    }
}
