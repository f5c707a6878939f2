//! p-variation, `V^p` norms and Hölder seminorms of sampled paths.

use super::path::SampledPath;
use crate::error::{Result, ZlabError};

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(ZlabError::InvalidArgument(format!(
            "variation exponent {p} must be ≥ 1"
        )))
    }
}

/// `best[j]`: the largest `Σ|x_{i+1} − x_i|^p` over partitions drawn from the
/// samples that end at sample `j`.
///
/// The inner scan runs backwards and stops once an upper bound for every
/// remaining predecessor — prefix maximum of `best` plus the largest
/// possible jump to the prefix range — can no longer beat the current value.
fn best_sums(x: &[num_complex::Complex64], p: f64) -> Vec<f64> {
    let n = x.len();
    let mut best = vec![0.0; n];
    let mut pre_best = vec![0.0f64; n];
    // bounding box of x over the prefix 0..=i
    let mut lo_re = vec![0.0; n];
    let mut hi_re = vec![0.0; n];
    let mut lo_im = vec![0.0; n];
    let mut hi_im = vec![0.0; n];
    for j in 0..n {
        let xj = x[j];
        let mut b = 0.0f64;
        for i in (0..j).rev() {
            let dre = (xj.re - lo_re[i]).abs().max((hi_re[i] - xj.re).abs());
            let dim = (xj.im - lo_im[i]).abs().max((hi_im[i] - xj.im).abs());
            let reach = dre.hypot(dim);
            if pre_best[i] + reach.powf(p) <= b {
                break;
            }
            let cand = best[i] + (xj - x[i]).norm().powf(p);
            if cand > b {
                b = cand;
            }
        }
        best[j] = b;
        pre_best[j] = if j == 0 { b } else { pre_best[j - 1].max(b) };
        if j == 0 {
            lo_re[0] = xj.re;
            hi_re[0] = xj.re;
            lo_im[0] = xj.im;
            hi_im[0] = xj.im;
        } else {
            lo_re[j] = lo_re[j - 1].min(xj.re);
            hi_re[j] = hi_re[j - 1].max(xj.re);
            lo_im[j] = lo_im[j - 1].min(xj.im);
            hi_im[j] = hi_im[j - 1].max(xj.im);
        }
    }
    best
}

/// `sup Σ|x(t_{j+1}) − x(t_j)|^p` over partitions from the sample points
/// (the p-th power of the p-variation).
///
/// For `p ≥ 1` this is also the supremum over all partitions of the linear
/// interpolant: refining inside a monotone segment never increases the sum.
pub fn p_variation_sum(path: &SampledPath, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(best_sums(path.values(), p).into_iter().fold(0.0, f64::max))
}

/// `|x|_{V^p}`.
pub fn p_variation(path: &SampledPath, p: f64) -> Result<f64> {
    Ok(p_variation_sum(path, p)?.powf(1.0 / p))
}

/// `‖x‖_{V^p}`: partitions carry one terminal term `|x(t_N)|^p`.
pub fn vp_norm(path: &SampledPath, p: f64) -> Result<f64> {
    check_p(p)?;
    let best = best_sums(path.values(), p);
    let s = best
        .iter()
        .zip(path.values())
        .map(|(b, v)| b + v.norm().powf(p))
        .fold(0.0, f64::max);
    Ok(s.powf(1.0 / p))
}

/// `sup_{s≠t ∈ I} |x(t) − x(s)| / |t − s|^α` over sample pairs in `[t0, t1]`
/// (the whole path when `window` is `None`).
///
/// For `α ≤ 1` the supremum over the linear interpolant is attained at nodes.
pub fn hoelder_norm(path: &SampledPath, alpha: f64, window: Option<(f64, f64)>) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ZlabError::InvalidArgument(format!(
            "Hölder exponent {alpha} must lie in (0, 1]"
        )));
    }
    let p = match window {
        Some((a, b)) => path.restrict(a, b)?,
        None => path.clone(),
    };
    let (t, x) = (p.times(), p.values());
    let mut best = 0.0f64;
    for j in 1..t.len() {
        for i in 0..j {
            let r = (x[j] - x[i]).norm() / (t[j] - t[i]).powf(alpha);
            if r > best {
                best = r;
            }
        }
    }
    Ok(best)
}
