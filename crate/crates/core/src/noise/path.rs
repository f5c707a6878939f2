use serde::{Deserialize, Serialize};

use super::rng::{NoiseKey, Process};
use crate::error::{Result, ZlabError};

/// Brownian increments `Δβ_k^{(j)}` on the mesh `t = s·dt`, `s = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    key: NoiseKey,
    /// Mesh offset (in steps) of the first increment relative to the keyed stream.
    offset: u64,
    dt: f64,
    steps: usize,
    /// `incr[j][k][s]`, `j ∈ {0: W₁, 1: W₂}`.
    incr: [Vec<Vec<f64>>; 2],
    /// Prefix sums `β(s·dt)`, length `steps + 1`.
    beta: [Vec<Vec<f64>>; 2],
}

fn prefix(incr: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(incr.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for v in incr {
        acc += v;
        out.push(acc);
    }
    out
}

impl NoisePath {
    /// Generate `modes1` / `modes2` independent Brownian motions up to `steps·dt`.
    pub fn generate(
        key: NoiseKey,
        dt: f64,
        steps: usize,
        modes1: usize,
        modes2: usize,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ZlabError::InvalidArgument(format!(
                "time step {dt} must be positive"
            )));
        }
        let sd = dt.sqrt();
        let gen = |process: Process, count: usize| -> Vec<Vec<f64>> {
            (0..count)
                .map(|k| {
                    let mut s = key.stream(process, k as u32, 0);
                    (0..steps).map(|_| sd * s.next_normal()).collect()
                })
                .collect()
        };
        Ok(Self::from_increments(
            key,
            0,
            dt,
            steps,
            [gen(Process::W1, modes1), gen(Process::W2, modes2)],
        ))
    }

    fn from_increments(
        key: NoiseKey,
        offset: u64,
        dt: f64,
        steps: usize,
        incr: [Vec<Vec<f64>>; 2],
    ) -> Self {
        let beta = [
            incr[0].iter().map(|v| prefix(v)).collect(),
            incr[1].iter().map(|v| prefix(v)).collect(),
        ];
        Self {
            key,
            offset,
            dt,
            steps,
            incr,
            beta,
        }
    }

    /// A path with no modes but a mesh (deterministic runs).
    pub fn empty(dt: f64, steps: usize) -> Self {
        Self {
            key: NoiseKey::new(0, 0),
            offset: 0,
            dt,
            steps,
            incr: [Vec::new(), Vec::new()],
            beta: [Vec::new(), Vec::new()],
        }
    }

    pub fn key(&self) -> NoiseKey {
        self.key
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn modes(&self, process: usize) -> usize {
        self.incr[process].len()
    }

    /// Mesh index of `t`; off-mesh or out-of-horizon times are rejected.
    pub fn step_of(&self, t: f64) -> Result<usize> {
        let x = t / self.dt;
        let s = x.round();
        if !(t.is_finite()) || s < 0.0 || (x - s).abs() > 1e-9 * x.abs().max(1.0) {
            return Err(ZlabError::OffMesh { t, dt: self.dt });
        }
        let s = s as usize;
        if s > self.steps {
            return Err(ZlabError::BeyondHorizon {
                t,
                horizon: self.horizon(),
            });
        }
        Ok(s)
    }

    /// `β_k^{(j)}(t)` for `j ∈ {1, 2}`.
    pub fn brownian_value(&self, j: usize, k: usize, t: f64) -> Result<f64> {
        let s = self.step_of(t)?;
        Ok(self.beta_at(j, k, s))
    }

    /// `β_k^{(j)}` at mesh index `s`.
    pub fn beta_at(&self, j: usize, k: usize, s: usize) -> f64 {
        self.beta[j - 1][k][s]
    }

    /// `Δβ_k^{(j)}` over `[s·dt, (s+1)·dt)`.
    pub fn increment(&self, j: usize, k: usize, s: usize) -> f64 {
        self.incr[j - 1][k][s]
    }

    pub fn increments(&self, j: usize, k: usize) -> &[f64] {
        &self.incr[j - 1][k]
    }

    pub fn betas(&self, j: usize, k: usize) -> &[f64] {
        &self.beta[j - 1][k]
    }

    /// Increments over mesh steps `[s0, s1)` as a path starting at zero,
    /// i.e. `β_σ(t) = β(σ + t) − β(σ)` with `σ = s0·dt`.
    pub fn window(&self, s0: usize, s1: usize) -> Result<NoisePath> {
        if s0 > s1 || s1 > self.steps {
            return Err(ZlabError::InvalidArgument(format!(
                "bad step window {s0}..{s1}"
            )));
        }
        let cut = |v: &Vec<Vec<f64>>| v.iter().map(|x| x[s0..s1].to_vec()).collect::<Vec<_>>();
        Ok(Self::from_increments(
            self.key,
            self.offset + s0 as u64,
            self.dt,
            s1 - s0,
            [cut(&self.incr[0]), cut(&self.incr[1])],
        ))
    }

    /// Increment path after the mesh time `σ`, up to the horizon.
    pub fn restart(&self, sigma: f64) -> Result<NoisePath> {
        let s = self.step_of(sigma)?;
        self.window(s, self.steps)
    }

    /// Join two consecutive windows.
    pub fn concat(&self, next: &NoisePath) -> Result<NoisePath> {
        if next.dt != self.dt || next.modes(0) != self.modes(0) || next.modes(1) != self.modes(1) {
            return Err(ZlabError::InvalidArgument("incompatible paths".into()));
        }
        let join = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| {
            a.iter()
                .zip(b)
                .map(|(x, y)| [x.as_slice(), y.as_slice()].concat())
                .collect::<Vec<_>>()
        };
        Ok(Self::from_increments(
            self.key,
            self.offset,
            self.dt,
            self.steps + next.steps,
            [
                join(&self.incr[0], &next.incr[0]),
                join(&self.incr[1], &next.incr[1]),
            ],
        ))
    }

    /// Same Brownian motion on a mesh `factor` times coarser.
    pub fn coarsen(&self, factor: usize) -> Result<NoisePath> {
        if factor == 0 || self.steps % factor != 0 {
            return Err(ZlabError::InvalidArgument(format!(
                "cannot coarsen {} steps by {factor}",
                self.steps
            )));
        }
        let c = |v: &Vec<Vec<f64>>| {
            v.iter()
                .map(|x| x.chunks(factor).map(|ch| ch.iter().sum()).collect())
                .collect::<Vec<Vec<f64>>>()
        };
        Ok(Self::from_increments(
            self.key,
            self.offset,
            self.dt * factor as f64,
            self.steps / factor,
            [c(&self.incr[0]), c(&self.incr[1])],
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> NoisePath {
        NoisePath::generate(NoiseKey::new(11, 2), 0.01, 100, 2, 1).unwrap()
    }

    #[test]
    fn starts_at_zero_and_is_deterministic() {
        let p = path();
        assert_eq!(p.brownian_value(1, 0, 0.0).unwrap(), 0.0);
        assert_eq!(p, path());
    }

    #[test]
    fn off_mesh_rejected() {
        let p = path();
        assert!(matches!(
            p.brownian_value(1, 0, 0.005),
            Err(ZlabError::OffMesh { .. })
        ));
        assert!(matches!(
            p.brownian_value(1, 0, 2.0),
            Err(ZlabError::BeyondHorizon { .. })
        ));
        assert!(p.brownian_value(1, 1, 0.3).is_ok());
    }

    #[test]
    fn restart_and_concat_reproduce_path() {
        let p = path();
        let a = p.window(0, 37).unwrap();
        let b = p.restart(0.37).unwrap();
        let joined = a.concat(&b).unwrap();
        assert_eq!(joined.increments(1, 1), p.increments(1, 1));
        assert_eq!(joined.increments(2, 0), p.increments(2, 0));
        let s = p.step_of(0.37).unwrap();
        for t in 0..b.steps() {
            let want = p.beta_at(1, 0, s + t) - p.beta_at(1, 0, s);
            assert!((b.beta_at(1, 0, t) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn coarsen_keeps_mesh_values() {
        let p = path();
        let c = p.coarsen(4).unwrap();
        assert_eq!(c.steps(), 25);
        for s in 0..=25 {
            assert!((c.beta_at(1, 1, s) - p.beta_at(1, 1, 4 * s)).abs() < 1e-13);
        }
        assert!(p.coarsen(3).is_err());
    }
}
