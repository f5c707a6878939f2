//! Python bindings: grids, fields, space-time blocks, norms, path variation
//! and the experiment harness.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use zlab_core::ground_state::{energy, variational_check, GroundConstants, GroundState};
use zlab_core::harness::{run, RunConfig};
use zlab_core::noise::NoiseKey;
use zlab_core::norms::sweep::random_field;
use zlab_core::norms::{d_norm, evaluate, s_total, wave_total, NormOptions, NormSpec, Regime};
use zlab_core::spectral::{self, lp_project, DyadicLadder, ProjKind};
use zlab_core::variation::{self as var, BesovOptions, SampledPath};
use zlab_core::ZlabError;

fn err(e: ZlabError) -> PyErr {
    match e {
        ZlabError::Config { .. } | ZlabError::InvalidArgument(_) | ZlabError::InvalidGrid(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn regime(name: &str) -> PyResult<Regime> {
    match name {
        "energy" => Ok(Regime::Energy),
        "endpoint" => Ok(Regime::Endpoint),
        _ => Err(PyValueError::new_err(format!(
            "unknown regime `{name}` (energy | endpoint)"
        ))),
    }
}

/// Periodic grid on `[-L/2, L/2)^d` with `n` points per axis.
#[pyclass(frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Grid(spectral::Grid);

#[pymethods]
impl Grid {
    #[new]
    #[pyo3(signature = (d, n, L))]
    #[allow(non_snake_case)]
    fn new(d: usize, n: usize, L: f64) -> PyResult<Self> {
        spectral::Grid::new(d, n, L).map(Grid).map_err(err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter(L)]
    fn length(&self) -> f64 {
        self.0.length()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    #[getter]
    fn nyquist(&self) -> f64 {
        self.0.nyquist()
    }

    /// Dyadic frequencies resolved on the grid.
    fn ladder(&self) -> Vec<f64> {
        DyadicLadder::for_grid(&self.0).lambdas()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(d={}, n={}, L={})",
            self.0.d(),
            self.0.n(),
            self.0.length()
        )
    }
}

/// Complex field on a grid (flat, row-major, physical values).
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Field(spectral::Field);

#[pymethods]
impl Field {
    #[new]
    fn new(grid: &Grid, values: Vec<Complex64>) -> PyResult<Self> {
        spectral::Field::from_vec(grid.0, values, spectral::Rep::Physical)
            .map(Field)
            .map_err(err)
    }

    /// Gaussian bump `a·exp(−|x|²/2w²)`.
    #[staticmethod]
    fn bump(grid: &Grid, amplitude: f64, width: f64) -> Self {
        Field(spectral::Field::from_real_fn(grid.0, |x| {
            amplitude * (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp()
        }))
    }

    /// Smooth random field with spectrum cut off near `cutoff`, unit `L²` norm.
    #[staticmethod]
    #[pyo3(signature = (grid, seed, index=0, cutoff=None))]
    fn random(grid: &Grid, seed: u64, index: u64, cutoff: Option<f64>) -> Self {
        let c = cutoff.unwrap_or(0.5 * grid.0.nyquist());
        Field(random_field(grid.0, NoiseKey::new(seed, index), 0, c))
    }

    /// Ground state pair `(a·W_λ, −a²·W_λ²)` on a four-dimensional grid.
    #[staticmethod]
    #[pyo3(signature = (grid, lam=1.0, multiple=1.0))]
    fn ground_state(grid: &Grid, lam: f64, multiple: f64) -> PyResult<(Field, Field)> {
        let st = GroundState::new(lam).state(grid.0, multiple).map_err(err)?;
        Ok((Field(st.x), Field(st.y)))
    }

    #[getter]
    fn grid(&self) -> Grid {
        Grid(*self.0.grid())
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.physical().into_data()
    }

    fn l2_norm(&self) -> f64 {
        self.0.l2_norm()
    }

    fn h1_norm(&self) -> f64 {
        self.0.h1_norm()
    }

    fn grad_norm_sq(&self) -> f64 {
        self.0.grad_norm_sq()
    }

    /// `e^{itΔ}f`.
    fn schrodinger(&self, t: f64) -> Self {
        Field(spectral::schrodinger_propagate(&self.0, t).physical())
    }

    /// `e^{it|∇|}f`.
    fn wave(&self, t: f64) -> Self {
        Field(spectral::wave_propagate(&self.0, t).physical())
    }

    /// Littlewood-Paley piece `P_λ f` (`P_{≤1}` for `λ = 1`).
    fn band(&self, lam: f64) -> PyResult<Self> {
        lp_project(&self.0, lam, ProjKind::Band)
            .map(|f| Field(f.physical()))
            .map_err(err)
    }

    fn __add__(&self, other: &Field) -> PyResult<Self> {
        self.0.check_grid(&other.0).map_err(err)?;
        Ok(Field(&self.0.physical() + &other.0.physical()))
    }

    fn __mul__(&self, a: Complex64) -> Self {
        Field(self.0.scale(a))
    }
}

/// Zakharov energy `e_Z(u, v)`.
#[pyfunction]
fn zakharov_energy(u: &Field, v: &Field) -> PyResult<f64> {
    energy(&u.0, &v.0).map_err(err)
}

/// Ground-state constants from the radial quadrature.
#[pyfunction]
fn ground_state_constants() -> std::collections::HashMap<&'static str, f64> {
    let c = GroundConstants::get();
    [
        ("w2_sq", c.w2_sq),
        ("grad_sq", c.grad_sq),
        ("energy", c.energy),
        ("quarter_w2_sq", c.quarter_w2_sq),
        ("radial_residual", c.radial_residual),
    ]
    .into_iter()
    .collect()
}

/// Variational constraints below the ground state: `(hypotheses_met, violated)`.
#[pyfunction]
#[pyo3(signature = (f, g, slack=1e-12))]
fn variational(f: &Field, g: &Field, slack: f64) -> PyResult<(bool, bool)> {
    let r = variational_check(&f.0, &g.0, slack).map_err(err)?;
    Ok((r.hypotheses_met, r.violated()))
}

/// Uniformly sampled space-time block `u(t_k, x)`.
#[pyclass]
struct Block(spectral::SpaceTimeBlock);

#[pymethods]
impl Block {
    #[staticmethod]
    fn free_schrodinger(f: &Field, dt: f64, m: usize) -> PyResult<Self> {
        spectral::SpaceTimeBlock::free_schrodinger(&f.0, 0.0, dt, m)
            .map(Block)
            .map_err(err)
    }

    #[staticmethod]
    fn free_wave(g: &Field, dt: f64, m: usize) -> PyResult<Self> {
        spectral::SpaceTimeBlock::free_wave(&g.0, 0.0, dt, m)
            .map(Block)
            .map_err(err)
    }

    #[staticmethod]
    fn from_snapshots(dt: f64, snapshots: Vec<Field>) -> PyResult<Self> {
        let s: Vec<spectral::Field> = snapshots.into_iter().map(|f| f.0).collect();
        spectral::SpaceTimeBlock::from_snapshots(0.0, dt, &s)
            .map(Block)
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.0.dt()
    }

    fn snapshot(&self, k: usize) -> PyResult<Field> {
        if k >= self.0.len() {
            return Err(PyValueError::new_err(format!("snapshot {k} out of range")));
        }
        Ok(Field(self.0.snapshot(k)))
    }

    /// `‖u‖_{S^{1,¼}}` (`energy`) or `‖u‖_{S^{½,0}}` (`endpoint`).
    #[pyo3(signature = (regime_name="energy"))]
    fn s_norm(&self, regime_name: &str) -> PyResult<f64> {
        s_total(&self.0, regime(regime_name)?, &NormOptions::default()).map_err(err)
    }

    /// Wave norm assembled over the ladder.
    #[pyo3(signature = (regime_name="energy"))]
    fn wave_norm(&self, regime_name: &str) -> PyResult<f64> {
        wave_total(&self.0, regime(regime_name)?, &NormOptions::default()).map_err(err)
    }

    /// `‖u‖_{L²_t W^{½,4}}`.
    fn d_norm(&self) -> PyResult<f64> {
        d_norm(&self.0, &NormOptions::default()).map_err(err)
    }

    /// Evaluate a norm specification given as JSON; returns `(family, λ, value)` rows.
    fn evaluate(&self, spec_json: &str) -> PyResult<Vec<(String, Option<f64>, f64)>> {
        let spec: NormSpec =
            serde_json::from_str(spec_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(evaluate(&spec, &self.0)
            .map_err(err)?
            .into_iter()
            .map(|r| (r.family, r.lambda, r.value))
            .collect())
    }
}

fn path(times: Vec<f64>, values: Vec<f64>) -> PyResult<SampledPath> {
    SampledPath::from_real(times, &values).map_err(err)
}

/// `|x|_{V^p}`: sup over partitions of `(Σ|Δx|^p)^{1/p}`.
#[pyfunction]
fn p_variation(times: Vec<f64>, values: Vec<f64>, p: f64) -> PyResult<f64> {
    var::p_variation(&path(times, values)?, p).map_err(err)
}

/// `‖x‖_{V^p}` including the terminal value.
#[pyfunction]
fn vp_norm(times: Vec<f64>, values: Vec<f64>, p: f64) -> PyResult<f64> {
    var::vp_norm(&path(times, values)?, p).map_err(err)
}

/// Hölder seminorm of exponent `alpha` over the sample nodes.
#[pyfunction]
fn hoelder_norm(times: Vec<f64>, values: Vec<f64>, alpha: f64) -> PyResult<f64> {
    var::hoelder_norm(&path(times, values)?, alpha, None).map_err(err)
}

/// Inhomogeneous temporal Besov norm `B^s_{p,q}` on the sampled window.
#[pyfunction]
#[pyo3(signature = (times, values, s, p, q, taper=Some(0.1)))]
fn besov_norm(
    times: Vec<f64>,
    values: Vec<f64>,
    s: f64,
    p: f64,
    q: f64,
    taper: Option<f64>,
) -> PyResult<f64> {
    let o = BesovOptions {
        taper,
        ..BesovOptions::default()
    };
    var::besov_time_norm(&path(times, values)?, s, p, q, &o).map_err(err)
}

/// Geometric Brownian motion `h_c = exp(−2cβ − 2c²t)`: returns `(t, h, β)`.
#[pyfunction]
#[pyo3(signature = (seed, c, dt, horizon, index=0))]
fn gbm_path(
    seed: u64,
    c: f64,
    dt: f64,
    horizon: f64,
    index: u64,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (h, b) = var::gbm_path(NoiseKey::new(seed, index), c, dt, horizon).map_err(err)?;
    Ok((
        h.times().to_vec(),
        h.values().iter().map(|v| v.re).collect(),
        b.values().iter().map(|v| v.re).collect(),
    ))
}

/// Run an experiment from a TOML configuration; returns the result summary as JSON.
/// When `out` is given the summary and tables are also written there.
#[pyfunction]
#[pyo3(signature = (config_toml, out=None, threads=None))]
fn run_experiment(
    py: Python<'_>,
    config_toml: &str,
    out: Option<std::path::PathBuf>,
    threads: Option<usize>,
) -> PyResult<String> {
    let cfg = RunConfig::from_toml_str(config_toml).map_err(err)?;
    let output = py.detach(|| run(&cfg, threads)).map_err(err)?;
    if let Some(dir) = out {
        output.write(&dir).map_err(err)?;
    }
    serde_json::to_string(&output.result).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn zlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", zlab_core::VERSION)?;
    m.add_class::<Grid>()?;
    m.add_class::<Field>()?;
    m.add_class::<Block>()?;
    m.add_function(wrap_pyfunction!(zakharov_energy, m)?)?;
    m.add_function(wrap_pyfunction!(ground_state_constants, m)?)?;
    m.add_function(wrap_pyfunction!(variational, m)?)?;
    m.add_function(wrap_pyfunction!(p_variation, m)?)?;
    m.add_function(wrap_pyfunction!(vp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(hoelder_norm, m)?)?;
    m.add_function(wrap_pyfunction!(besov_norm, m)?)?;
    m.add_function(wrap_pyfunction!(gbm_path, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
