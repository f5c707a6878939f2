use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZlabError};

/// A scalar path sampled at strictly increasing times, interpolated linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<Complex64>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(ZlabError::InvalidArgument(format!(
                "path needs matching nonempty times/values (got {} and {})",
                times.len(),
                values.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite())
            || values
                .iter()
                .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(ZlabError::NonFinite);
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ZlabError::InvalidArgument(
                "path times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, values })
    }

    pub fn from_real(times: Vec<f64>, values: &[f64]) -> Result<Self> {
        Self::new(
            times,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Samples `values[k]` at `t0 + k·dt`.
    pub fn uniform(t0: f64, dt: f64, values: &[f64]) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ZlabError::InvalidArgument(format!(
                "time step {dt} must be positive"
            )));
        }
        let times = (0..values.len()).map(|k| t0 + k as f64 * dt).collect();
        Self::from_real(times, values)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    /// Spacing of a uniform mesh, if the samples are uniform to relative `1e-9`.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.len() < 2 {
            return None;
        }
        let dt = self.duration() / (self.len() - 1) as f64;
        self.times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt)
            .then_some(dt)
    }

    /// Value of the linear interpolant at `t`, clamped to the end values outside.
    pub fn eval(&self, t: f64) -> Complex64 {
        if t <= self.start() {
            return self.values[0];
        }
        if t >= self.end() {
            return *self.values.last().unwrap();
        }
        let j = self.times.partition_point(|&s| s <= t);
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = (t - t0) / (t1 - t0);
        self.values[j - 1] * (1.0 - w) + self.values[j] * w
    }

    /// The linear interpolant sampled on a uniform mesh of step at most `dt`
    /// spanning the same interval.
    pub fn resample(&self, dt: f64) -> Result<SampledPath> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ZlabError::InvalidArgument(format!(
                "time step {dt} must be positive"
            )));
        }
        if self.len() < 2 {
            return Ok(self.clone());
        }
        let n = (self.duration() / dt).ceil().max(1.0) as usize;
        let h = self.duration() / n as f64;
        let times: Vec<f64> = (0..=n).map(|k| self.start() + k as f64 * h).collect();
        let values = times.iter().map(|&t| self.eval(t)).collect();
        Self::new(times, values)
    }

    /// Samples with `t0 ≤ t ≤ t1`.
    pub fn restrict(&self, t0: f64, t1: f64) -> Result<SampledPath> {
        let (times, values): (Vec<f64>, Vec<Complex64>) = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= t0 && **t <= t1)
            .map(|(t, v)| (*t, *v))
            .unzip();
        Self::new(times, values)
    }

    /// Prepend a linear ramp rising from 0 at `start − len` to the first value,
    /// sampled on this path's uniform mesh.
    pub fn with_ramp_prefix(&self, len: f64) -> Result<SampledPath> {
        let dt = self
            .uniform_step()
            .ok_or_else(|| ZlabError::InvalidArgument("ramp prefix needs a uniform path".into()))?;
        let k = (len / dt).round() as usize;
        if k == 0 || ((k as f64 * dt) - len).abs() > 1e-9 * len.max(1.0) {
            return Err(ZlabError::InvalidArgument(format!(
                "ramp length {len} is not a multiple of {dt}"
            )));
        }
        let v0 = self.values[0];
        let mut times = Vec::with_capacity(k + self.len());
        let mut values = Vec::with_capacity(k + self.len());
        for i in 0..k {
            times.push(self.start() - (k - i) as f64 * dt);
            values.push(v0 * (i as f64 / k as f64));
        }
        times.extend_from_slice(&self.times);
        values.extend_from_slice(&self.values);
        Self::new(times, values)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> SampledPath {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, a: f64) -> SampledPath {
        self.map(|v| v * a)
    }

    /// `(Σ_k Δt_k |x_k|^p)^{1/p}` with trapezoid weights; `p = ∞` gives the max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        if self.len() < 2 {
            return 0.0;
        }
        let mut s = 0.0;
        for k in 0..self.len() - 1 {
            let h = self.times[k + 1] - self.times[k];
            s += 0.5 * h * (self.values[k].norm().powf(p) + self.values[k + 1].norm().powf(p));
        }
        s.powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unsorted_times() {
        assert!(SampledPath::from_real(vec![0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(SampledPath::from_real(vec![], &[]).is_err());
    }

    #[test]
    fn ramp_prefix_starts_at_zero() {
        let p = SampledPath::uniform(0.0, 0.25, &[1.0, 0.5, 0.2]).unwrap();
        let r = p.with_ramp_prefix(1.0).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r.values()[0].re, 0.0);
        assert_eq!(r.start(), -1.0);
        assert!((r.values()[2].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn resample_keeps_endpoints() {
        let p = SampledPath::from_real(vec![0.0, 0.3, 1.0], &[0.0, 3.0, 1.0]).unwrap();
        let r = p.resample(0.1).unwrap();
        assert!(r.uniform_step().is_some());
        assert_eq!(r.end(), 1.0);
        assert!((r.eval(0.3).re - 3.0).abs() < 1e-12);
    }
}
