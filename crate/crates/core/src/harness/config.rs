//! Run configuration: a TOML document with nested sections, deserialized
//! with field paths attached to every error.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Scheme, Thresholds};
use crate::error::{Result, ZlabError};
use crate::noise::NoisePreset;
use crate::norms::sweep::Estimate;
use crate::norms::NormSpec;
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Simulate,
    Montecarlo,
    Scatterprob,
    Equivalence,
    Groundstate,
    Norms,
    Variation,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Montecarlo => "montecarlo",
            ExperimentKind::Scatterprob => "scatterprob",
            ExperimentKind::Equivalence => "equivalence",
            ExperimentKind::Groundstate => "groundstate",
            ExperimentKind::Norms => "norms",
            ExperimentKind::Variation => "variation",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = ZlabError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
            ZlabError::Config {
                path: "experiment".into(),
                message: format!("unknown experiment `{s}`"),
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.d, self.n, self.l).map_err(|e| config_err("grid", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

impl TimeConfig {
    /// Number of steps, requiring `dt·steps = T` on the mesh.
    pub fn steps(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ZlabError::Config {
                path: "time.dt".into(),
                message: "must be positive".into(),
            });
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(ZlabError::Config {
                path: "time.T".into(),
                message: "must be positive".into(),
            });
        }
        let steps = (self.t / self.dt).round();
        if (steps * self.dt - self.t).abs() > 1e-9 * self.t {
            return Err(ZlabError::Config {
                path: "time.T".into(),
                message: format!("T = {} is not a multiple of dt = {}", self.t, self.dt),
            });
        }
        Ok(steps as usize)
    }
}

/// Initial-data recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `(a·W_λ, −a²·W_λ²)`.
    GroundState {
        #[serde(default = "one")]
        multiple: f64,
        #[serde(default = "one")]
        lambda: f64,
    },
    /// Gaussian bumps `X = a·e^{−|x|²/2w²}`, `Y = b·e^{−|x|²/2w_y²}`.
    Bump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        wave_amplitude: f64,
        #[serde(default)]
        wave_width: Option<f64>,
    },
    /// Fields stored in the binary container format.
    File { x: PathBuf, y: Option<PathBuf> },
}

fn one() -> f64 {
    1.0
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::GroundState {
            multiple: 1.0,
            lambda: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "yes")]
    pub coupling: bool,
    /// Diagnostics cadence in steps (default: every step).
    #[serde(default = "one_usize")]
    pub diag_every: usize,
}

fn yes() -> bool {
    true
}

fn one_usize() -> usize {
    1
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Direct,
            coupling: true,
            diag_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    #[serde(default = "default_factor")]
    pub m_blow_factor: f64,
    #[serde(default = "default_d_blow")]
    pub d_blow: f64,
    #[serde(default = "default_scatter_tol")]
    pub scatter_tol: f64,
    /// Late checkpoint times for the scattering probe (empty: 0.8T, 0.9T, T).
    #[serde(default)]
    pub checkpoints: Vec<f64>,
    /// Stopping-functional index `n` (threshold `e_Z(W,−W²) − 1/n`); off when absent.
    #[serde(default)]
    pub sigma_star_n: Option<u32>,
}

fn default_factor() -> f64 {
    Thresholds::default().m_blow_factor
}

fn default_d_blow() -> f64 {
    Thresholds::default().d_blow
}

fn default_scatter_tol() -> f64 {
    0.2
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            m_blow_factor: default_factor(),
            d_blow: default_d_blow(),
            scatter_tol: default_scatter_tol(),
            checkpoints: Vec::new(),
            sigma_star_n: None,
        }
    }
}

impl ThresholdConfig {
    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            m_blow_factor: self.m_blow_factor,
            d_blow: self.d_blow,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterConfig {
    pub c_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceConfig {
    /// Number of time steps compared (`dt, dt/2, …`); gives `levels − 1` ratios.
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Restart time for the refined-restart identity check (default `T/2`).
    #[serde(default)]
    pub sigma: Option<f64>,
}

fn default_levels() -> usize {
    4
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        Self {
            levels: default_levels(),
            sigma: None,
        }
    }
}

/// Block source for the `norms` experiment: a file, or the free flow of the
/// configured initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockSource {
    File { path: PathBuf },
    FreeSchrodinger { dt: f64, m: usize },
    FreeWave { dt: f64, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dt: f64,
    pub m: usize,
    pub samples: usize,
    pub estimates: Vec<Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsConfig {
    #[serde(default)]
    pub block: Option<BlockSource>,
    #[serde(default)]
    pub specs: Vec<NormSpec>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSource {
    /// `h_c` on `[0, horizon]`.
    Gbm { c: f64, dt: f64, horizon: f64 },
    /// Standard Brownian motion on `[0, horizon]`.
    Bm { dt: f64, horizon: f64 },
    /// CSV file with `t, x` rows (a header line is allowed).
    Csv { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovConfig {
    pub s: f64,
    pub p: f64,
    /// `inf` is accepted.
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VpExperimentConfig {
    pub c: f64,
    #[serde(default = "three")]
    pub p: f64,
    pub horizons: Vec<f64>,
    pub dt: f64,
}

fn three() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailExperimentConfig {
    pub c_list: Vec<f64>,
    pub c_prime: f64,
    pub dt: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationConfig {
    #[serde(default)]
    pub source: Option<PathSource>,
    /// Exponents for `|x|_{V^p}` and `‖x‖_{V^p}`.
    #[serde(default = "default_ps")]
    pub p: Vec<f64>,
    #[serde(default)]
    pub hoelder: Option<f64>,
    #[serde(default)]
    pub besov: Option<BesovConfig>,
    #[serde(default)]
    pub vp_experiment: Option<VpExperimentConfig>,
    #[serde(default)]
    pub tail_experiment: Option<TailExperimentConfig>,
}

fn default_ps() -> Vec<f64> {
    vec![3.0]
}

/// Full run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_usize")]
    pub paths: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub time: Option<TimeConfig>,
    #[serde(default = "no_noise")]
    pub noise: NoisePreset,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    #[serde(default)]
    pub scatter: Option<ScatterConfig>,
    #[serde(default)]
    pub equivalence: Option<EquivalenceConfig>,
    #[serde(default)]
    pub norms: Option<NormsConfig>,
    #[serde(default)]
    pub variation: Option<VariationConfig>,
}

fn no_noise() -> NoisePreset {
    NoisePreset::None
}

pub(crate) fn config_err(path: &str, e: impl std::fmt::Display) -> ZlabError {
    ZlabError::Config {
        path: path.into(),
        message: e.to_string(),
    }
}

impl RunConfig {
    /// Minimal configuration for an experiment kind; sections are filled in by the caller.
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            seed: 0,
            paths: 1,
            output: None,
            grid: None,
            time: None,
            noise: NoisePreset::None,
            initial: InitialData::default(),
            integration: IntegrationConfig::default(),
            thresholds: ThresholdConfig::default(),
            scatter: None,
            equivalence: None,
            norms: None,
            variation: None,
        }
    }

    /// Parse a TOML document; errors carry the dotted path of the bad field.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| config_err("<document>", e.message()))?;
        Self::from_table(table)
    }

    /// Parse a document for a known experiment kind: a missing `experiment`
    /// key is filled in, a conflicting one is rejected.
    pub fn from_toml_str_as(text: &str, kind: ExperimentKind) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| config_err("<document>", e.message()))?;
        match table.get("experiment").and_then(|v| v.as_str()) {
            None if !table.contains_key("experiment") => {
                table.insert("experiment".into(), toml::Value::String(kind.name().into()));
            }
            Some(k) if k == kind.name() => {}
            _ => {
                return Err(config_err(
                    "experiment",
                    format!(
                        "configuration declares a different experiment than `{}`",
                        kind.name()
                    ),
                ))
            }
        }
        Self::from_table(table)
    }

    fn from_table(table: toml::Table) -> Result<Self> {
        let cfg: RunConfig =
            serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
                let path = e.path().to_string();
                ZlabError::Config {
                    path,
                    message: e.into_inner().message().to_string(),
                }
            })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| ZlabError::Serde(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid> {
        self.grid
            .as_ref()
            .ok_or_else(|| config_err("grid", "missing section"))?
            .build()
    }

    pub fn time(&self) -> Result<(f64, usize)> {
        let t = self
            .time
            .as_ref()
            .ok_or_else(|| config_err("time", "missing section"))?;
        Ok((t.dt, t.steps()?))
    }

    /// Semantic checks beyond the schema, per experiment kind.
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        if self.paths == 0 {
            return Err(config_err("paths", "must be at least 1"));
        }
        let th = &self.thresholds;
        if !(th.m_blow_factor > 1.0) {
            return Err(config_err("thresholds.m_blow_factor", "must exceed 1"));
        }
        if !(th.d_blow > 0.0) {
            return Err(config_err("thresholds.d_blow", "must be positive"));
        }
        if !(th.scatter_tol > 0.0) {
            return Err(config_err("thresholds.scatter_tol", "must be positive"));
        }
        if self.integration.diag_every == 0 {
            return Err(config_err("integration.diag_every", "must be at least 1"));
        }
        match &self.initial {
            InitialData::GroundState { lambda, .. } if !(*lambda > 0.0) => {
                return Err(config_err("initial.lambda", "must be positive"))
            }
            InitialData::Bump { width, .. } if !(*width > 0.0) => {
                return Err(config_err("initial.width", "must be positive"))
            }
            InitialData::Bump {
                wave_width: Some(w),
                ..
            } if !(*w > 0.0) => return Err(config_err("initial.wave_width", "must be positive")),
            _ => {}
        }
        match self.experiment {
            Simulate | Montecarlo | Scatterprob | Equivalence => {
                self.grid()?;
                let (dt, steps) = self.time()?;
                if !th.checkpoints.is_empty() {
                    self.checkpoint_steps(dt, steps)?;
                }
            }
            Groundstate | Norms | Variation => {
                if self.grid.is_some() {
                    self.grid()?;
                }
            }
        }
        match self.experiment {
            Scatterprob => {
                if !matches!(self.noise, NoisePreset::Nonconservative { .. }) {
                    return Err(config_err(
                        "noise.kind",
                        "scatterprob needs the nonconservative preset",
                    ));
                }
                let s = self
                    .scatter
                    .as_ref()
                    .ok_or_else(|| config_err("scatter", "missing section"))?;
                if s.c_list.is_empty() {
                    return Err(config_err("scatter.c_list", "must not be empty"));
                }
                if let Some(i) = s.c_list.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
                    return Err(config_err(&format!("scatter.c_list[{i}]"), "must be ≥ 0"));
                }
            }
            Equivalence => {
                let e = self.equivalence.clone().unwrap_or_default();
                if e.levels < 2 {
                    return Err(config_err("equivalence.levels", "need at least 2 levels"));
                }
                if let Some(s) = e.sigma {
                    let t = self.time.as_ref().map(|t| t.t).unwrap_or(0.0);
                    if !(s > 0.0 && s < t) {
                        return Err(config_err(
                            "equivalence.sigma",
                            "must lie strictly inside (0, T)",
                        ));
                    }
                }
            }
            Norms => {
                let n = self
                    .norms
                    .as_ref()
                    .ok_or_else(|| config_err("norms", "missing section"))?;
                if n.specs.is_empty() && n.sweep.is_none() {
                    return Err(config_err("norms", "need `specs` or `sweep`"));
                }
                if !n.specs.is_empty() && n.block.is_none() {
                    return Err(config_err("norms.block", "missing block source"));
                }
                if matches!(
                    n.block,
                    Some(BlockSource::FreeSchrodinger { .. } | BlockSource::FreeWave { .. })
                ) || n.sweep.is_some()
                {
                    self.grid()?;
                }
            }
            Variation => {
                let v = self
                    .variation
                    .as_ref()
                    .ok_or_else(|| config_err("variation", "missing section"))?;
                if v.source.is_none() && v.vp_experiment.is_none() && v.tail_experiment.is_none() {
                    return Err(config_err("variation", "need a `source` or an experiment"));
                }
                if let Some(i) = v.p.iter().position(|p| !(*p >= 1.0)) {
                    return Err(config_err(&format!("variation.p[{i}]"), "must be ≥ 1"));
                }
                if let Some(a) = v.hoelder {
                    if !(a > 0.0 && a <= 1.0) {
                        return Err(config_err("variation.hoelder", "must lie in (0, 1]"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Mesh indices of the scattering checkpoints (defaults `0.8T, 0.9T, T`).
    pub fn checkpoint_steps(&self, dt: f64, steps: usize) -> Result<Vec<usize>> {
        let t_end = dt * steps as f64;
        let times: Vec<f64> = if self.thresholds.checkpoints.is_empty() {
            vec![0.8 * t_end, 0.9 * t_end, t_end]
        } else {
            self.thresholds.checkpoints.clone()
        };
        times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let path = format!("thresholds.checkpoints[{i}]");
                let k = (t / dt).round();
                if !(t > 0.0 && t <= t_end * (1.0 + 1e-12)) {
                    return Err(config_err(&path, format!("{t} outside (0, T]")));
                }
                if (k * dt - t).abs() > 1e-9 * t_end {
                    return Err(config_err(&path, format!("{t} is not on the time mesh")));
                }
                Ok(k as usize)
            })
            .collect()
    }
}
