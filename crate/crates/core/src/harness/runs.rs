//! The seven experiment kinds. Every randomized quantity is keyed by
//! `(seed, path index)`; parallel loops collect by index, so results do not
//! depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{config_err, BlockSource, ExperimentKind, InitialData, PathSource, RunConfig};
use super::result::{num, RunOutput, RunResult, Table};
use crate::dynamics::{
    integrate, refined_restart, restart_inverse, scattering_probe, to_rescaled, Outcome, RunSpec,
    Scheme, Trajectory, ZakharovState,
};
use crate::error::{Result, ZlabError};
use crate::ground_state::{
    box_length_for_tail, ground_state_residual, sigma_star_crossing, GroundConstants, GroundState,
};
use crate::noise::{NoiseKey, NoiseModel, NoisePath, NoisePreset, RNG_KEY_SCHEMA_VERSION};
use crate::norms::sweep::{estimate_constant_sweep, SweepSpec};
use crate::norms::{evaluate, NormOptions};
use crate::spectral::io::{load_block, load_field};
use crate::spectral::{dealias, Field, Grid, Rep, SpaceTimeBlock};
use crate::variation::{
    besov_time_norm, gbm_path, gbm_tail_experiment, gbm_vp_experiment, hoelder_norm, l6_norm,
    p_variation, vp_norm, BesovOptions, SampledPath,
};

/// Command-line style overrides applied on top of a configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = self.paths {
            cfg.paths = p;
        }
        cfg.validate()
    }
}

/// Run the configured experiment, on `threads` workers when given.
pub fn run(cfg: &RunConfig, threads: Option<usize>) -> Result<RunOutput> {
    cfg.validate()?;
    match threads {
        Some(t) => {
            if t == 0 {
                return Err(config_err("threads", "must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| ZlabError::InvalidArgument(e.to_string()))?;
            pool.install(|| dispatch(cfg))
        }
        None => dispatch(cfg),
    }
}

fn dispatch(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.experiment {
        ExperimentKind::Simulate => run_simulate(cfg),
        ExperimentKind::Montecarlo => run_montecarlo(cfg),
        ExperimentKind::Scatterprob => run_scatterprob(cfg),
        ExperimentKind::Equivalence => run_equivalence(cfg),
        ExperimentKind::Groundstate => run_groundstate(cfg),
        ExperimentKind::Norms => run_norms(cfg),
        ExperimentKind::Variation => run_variation(cfg),
    }
}

fn finish(
    cfg: &RunConfig,
    records: Vec<Value>,
    aggregates: Value,
    tables: Vec<Table>,
) -> RunOutput {
    let files = tables.iter().map(|t| t.file_name()).collect();
    RunOutput {
        result: RunResult {
            toolkit_version: crate::VERSION.to_string(),
            rng_key_schema_version: RNG_KEY_SCHEMA_VERSION,
            experiment: cfg.experiment.name().to_string(),
            base_seed: cfg.seed,
            config: cfg.clone(),
            records,
            aggregates,
            files,
        },
        tables,
    }
}

fn to_values<T: Serialize>(items: &[T]) -> Result<Vec<Value>> {
    items.iter().map(|r| Ok(serde_json::to_value(r)?)).collect()
}

fn bump(grid: Grid, a: f64, w: f64) -> Field {
    Field::from_real_fn(grid, |x| {
        a * (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * w * w)).exp()
    })
}

/// Initial state from the configured recipe. The wave datum is truncated to
/// the 2/3-rule range: the coupled scheme forces only those modes, and with
/// `Im Y` confined there the discrete energy is conserved up to the splitting
/// error alone.
pub fn initial_state(cfg: &RunConfig, grid: Grid) -> Result<ZakharovState> {
    let st = match &cfg.initial {
        InitialData::GroundState { multiple, lambda } => {
            GroundState::new(*lambda).state(grid, *multiple)
        }
        InitialData::Bump {
            amplitude,
            width,
            wave_amplitude,
            wave_width,
        } => ZakharovState::direct(
            bump(grid, *amplitude, *width),
            bump(grid, *wave_amplitude, wave_width.unwrap_or(*width)),
        ),
        InitialData::File { x, y } => {
            let xf = load_field(x).map_err(|e| config_err("initial.x", e))?;
            let yf = match y {
                Some(p) => load_field(p).map_err(|e| config_err("initial.y", e))?,
                None => Field::zeros(grid, Rep::Physical),
            };
            if *xf.grid() != grid || *yf.grid() != grid {
                return Err(config_err(
                    "initial",
                    "stored fields do not live on the configured grid",
                ));
            }
            ZakharovState::direct(xf, yf)
        }
    }?;
    ZakharovState::direct(st.x, dealias(&st.y))
}

fn noise_model(grid: Grid, preset: &NoisePreset) -> Result<NoiseModel> {
    NoiseModel::build(grid, preset).map_err(|e| config_err("noise", e))
}

fn generate_path(
    model: &NoiseModel,
    seed: u64,
    index: usize,
    dt: f64,
    steps: usize,
) -> Result<NoisePath> {
    if model.is_empty() {
        Ok(NoisePath::empty(dt, steps))
    } else {
        NoisePath::generate(
            NoiseKey::new(seed, index as u64),
            dt,
            steps,
            model.modes1().len(),
            model.modes2().len(),
        )
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn run_spec(cfg: &RunConfig, dt: f64, steps: usize, checkpoint_every: usize) -> RunSpec {
    RunSpec {
        dt,
        steps,
        checkpoint_every,
        diag_every: cfg.integration.diag_every,
        scheme: cfg.integration.scheme,
        coupling: cfg.integration.coupling,
        thresholds: cfg.thresholds.thresholds(),
    }
}

/// Per-path outcome of a trajectory run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub base_seed: u64,
    pub path_index: usize,
    pub outcome: Outcome,
    pub mass_initial: f64,
    pub mass_final: f64,
    /// `max_t |M(t) − M(0)| / M(0)` over the diagnostic samples.
    pub mass_drift: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    /// `max_t |e(t) − e(0)| / |e(0)|`.
    pub energy_drift: f64,
    /// First checkpoint time where the stopping functional crosses its threshold.
    pub sigma_star: Option<f64>,
}

fn max_rel_drift(v: &[f64]) -> f64 {
    let v0 = v[0];
    v.iter().map(|x| (x - v0).abs()).fold(0.0, f64::max) / v0.abs().max(f64::MIN_POSITIVE)
}

fn path_record(
    cfg: &RunConfig,
    index: usize,
    traj: &Trajectory,
    model: &NoiseModel,
    path: &NoisePath,
) -> Result<PathRecord> {
    let d = &traj.diagnostics;
    let last = d.len() - 1;
    let sigma_star = match cfg.thresholds.sigma_star_n {
        Some(n) => sigma_star_crossing(&traj.checkpoints, model, path, n)?,
        None => None,
    };
    Ok(PathRecord {
        base_seed: cfg.seed,
        path_index: index,
        outcome: traj.outcome,
        mass_initial: d.mass[0],
        mass_final: d.mass[last],
        mass_drift: max_rel_drift(&d.mass),
        energy_initial: d.energy[0],
        energy_final: d.energy[last],
        energy_drift: max_rel_drift(&d.energy),
        sigma_star,
    })
}

fn checkpoint_cadence(cfg: &RunConfig, steps: usize) -> usize {
    let base = if cfg.thresholds.sigma_star_n.is_some() {
        (steps / 10).max(1)
    } else {
        steps
    };
    gcd(steps, base).max(1)
}

fn run_simulate(cfg: &RunConfig) -> Result<RunOutput> {
    let grid = cfg.grid()?;
    let (dt, steps) = cfg.time()?;
    let model = noise_model(grid, &cfg.noise)?;
    let x0 = initial_state(cfg, grid)?;
    let path = generate_path(&model, cfg.seed, 0, dt, steps)?;
    let traj = integrate(
        &x0,
        &model,
        &path,
        &run_spec(cfg, dt, steps, checkpoint_cadence(cfg, steps)),
    )?;
    let rec = path_record(cfg, 0, &traj, &model, &path)?;
    let d = &traj.diagnostics;
    let mut t = Table::new(
        "diagnostics",
        &["t", "mass", "energy", "h1_X", "l2_Y", "d_accum"],
    );
    for i in 0..d.len() {
        t.push(
            [
                d.t[i],
                d.mass[i],
                d.energy[i],
                d.h1_x[i],
                d.l2_y[i],
                d.d_accum[i],
            ]
            .iter()
            .map(|v| num(*v))
            .collect(),
        );
    }
    let agg = json!({ "outcome": rec.outcome, "mass_drift": rec.mass_drift, "energy_drift": rec.energy_drift });
    Ok(finish(cfg, to_values(&[rec])?, agg, vec![t]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloAggregates {
    pub paths: usize,
    pub p_blowup: f64,
    pub se_blowup: f64,
    pub mass_initial: f64,
    pub mean_mass_final: f64,
    pub se_mass_final: f64,
    pub max_mass_drift: f64,
    pub p_sigma_star: f64,
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Binomial proportion and its standard error.
pub fn proportion(hits: usize, n: usize) -> (f64, f64) {
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Aggregates of Monte-Carlo path records (order-independent).
pub fn aggregate_paths(records: &[PathRecord]) -> MonteCarloAggregates {
    let n = records.len();
    let (p_blowup, se_blowup) =
        proportion(records.iter().filter(|r| r.outcome.is_blowup()).count(), n);
    let finals: Vec<f64> = records.iter().map(|r| r.mass_final).collect();
    let (mean_mass_final, se_mass_final) = mean_se(&finals);
    MonteCarloAggregates {
        paths: n,
        p_blowup,
        se_blowup,
        mass_initial: records.first().map_or(0.0, |r| r.mass_initial),
        mean_mass_final,
        se_mass_final,
        max_mass_drift: records.iter().map(|r| r.mass_drift).fold(0.0, f64::max),
        p_sigma_star: proportion(records.iter().filter(|r| r.sigma_star.is_some()).count(), n).0,
    }
}

fn run_montecarlo(cfg: &RunConfig) -> Result<RunOutput> {
    let grid = cfg.grid()?;
    let (dt, steps) = cfg.time()?;
    let model = noise_model(grid, &cfg.noise)?;
    let x0 = initial_state(cfg, grid)?;
    let spec = run_spec(cfg, dt, steps, checkpoint_cadence(cfg, steps));
    let records: Vec<PathRecord> = (0..cfg.paths)
        .into_par_iter()
        .map(|i| {
            let path = generate_path(&model, cfg.seed, i, dt, steps)?;
            let traj = integrate(&x0, &model, &path, &spec)?;
            path_record(cfg, i, &traj, &model, &path)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "paths",
        &[
            "base_seed",
            "path_index",
            "outcome",
            "t_blow",
            "mass_final",
            "mass_drift",
            "energy_final",
            "sigma_star",
        ],
    );
    for r in &records {
        let (kind, tb) = outcome_cols(&r.outcome);
        t.push(vec![
            r.base_seed.to_string(),
            r.path_index.to_string(),
            kind,
            tb,
            num(r.mass_final),
            num(r.mass_drift),
            num(r.energy_final),
            r.sigma_star.map(num).unwrap_or_default(),
        ]);
    }
    let agg = serde_json::to_value(aggregate_paths(&records))?;
    Ok(finish(cfg, to_values(&records)?, agg, vec![t]))
}

fn outcome_cols(o: &Outcome) -> (String, String) {
    match o {
        Outcome::Global => ("global".into(), String::new()),
        Outcome::Blowup { t } => ("blowup".into(), num(*t)),
        Outcome::Undecided => ("undecided".into(), String::new()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRecord {
    pub c: f64,
    pub base_seed: u64,
    pub path_index: usize,
    pub outcome: Outcome,
    pub scatters: bool,
    pub max_rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub c: f64,
    pub paths: usize,
    pub p_scatter: f64,
    pub se: f64,
}

/// `(c, M, p_scatter, SE)` rows, in order of first appearance of each `c`.
pub fn aggregate_scatter(records: &[ScatterRecord]) -> Vec<ScatterRow> {
    let mut cs: Vec<f64> = Vec::new();
    for r in records {
        if !cs.contains(&r.c) {
            cs.push(r.c);
        }
    }
    cs.into_iter()
        .map(|c| {
            let rs: Vec<&ScatterRecord> = records.iter().filter(|r| r.c == c).collect();
            let (p, se) = proportion(rs.iter().filter(|r| r.scatters).count(), rs.len());
            ScatterRow {
                c,
                paths: rs.len(),
                p_scatter: p,
                se,
            }
        })
        .collect()
}

fn run_scatterprob(cfg: &RunConfig) -> Result<RunOutput> {
    let grid = cfg.grid()?;
    let (dt, steps) = cfg.time()?;
    let x0 = initial_state(cfg, grid)?;
    let ck_steps = cfg.checkpoint_steps(dt, steps)?;
    let every = ck_steps.iter().fold(steps, |g, &k| gcd(g, k));
    let ck_times: Vec<f64> = ck_steps.iter().map(|&k| k as f64 * dt).collect();
    let spec = run_spec(cfg, dt, steps, every);
    let c_list = &cfg.scatter.as_ref().expect("validated").c_list;
    let mut records = Vec::with_capacity(c_list.len() * cfg.paths);
    for &c in c_list {
        let model = noise_model(grid, &NoisePreset::Nonconservative { c })?;
        let rs: Vec<ScatterRecord> = (0..cfg.paths)
            .into_par_iter()
            .map(|i| {
                let path = generate_path(&model, cfg.seed, i, dt, steps)?;
                let traj = integrate(&x0, &model, &path, &spec)?;
                let rep =
                    scattering_probe(&traj, &model, &path, &ck_times, cfg.thresholds.scatter_tol)?;
                Ok(ScatterRecord {
                    c,
                    base_seed: cfg.seed,
                    path_index: i,
                    outcome: traj.outcome,
                    scatters: rep.summary.scatters,
                    max_rel_diff: rep.summary.max_rel_diff,
                })
            })
            .collect::<Result<_>>()?;
        records.extend(rs);
    }
    let rows = aggregate_scatter(&records);
    let mut t = Table::new("scatter", &["c", "M", "p_scatter", "SE"]);
    for r in &rows {
        t.push(vec![
            num(r.c),
            r.paths.to_string(),
            num(r.p_scatter),
            num(r.se),
        ]);
    }
    let mut tp = Table::new(
        "paths",
        &[
            "c",
            "base_seed",
            "path_index",
            "outcome",
            "scatters",
            "max_rel_diff",
        ],
    );
    for r in &records {
        tp.push(vec![
            num(r.c),
            r.base_seed.to_string(),
            r.path_index.to_string(),
            outcome_cols(&r.outcome).0,
            r.scatters.to_string(),
            num(r.max_rel_diff),
        ]);
    }
    let agg = json!({ "rows": rows });
    Ok(finish(cfg, to_values(&records)?, agg, vec![t, tp]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceLevel {
    pub dt: f64,
    pub steps: usize,
    /// `sup_t ‖X_direct(t) − X_rescaled(t)‖_{H¹}` over the stored checkpoints.
    pub discrepancy: f64,
    /// Discrepancy of the previous (coarser) level divided by this one.
    pub ratio: Option<f64>,
}

fn run_equivalence(cfg: &RunConfig) -> Result<RunOutput> {
    let grid = cfg.grid()?;
    let (dt, steps) = cfg.time()?;
    let eq = cfg.equivalence.clone().unwrap_or_default();
    let model = noise_model(grid, &cfg.noise)?;
    let x0 = initial_state(cfg, grid)?;
    let refine = 1usize << (eq.levels - 1);
    let fine = generate_path(&model, cfg.seed, 0, dt / refine as f64, steps * refine)?;
    let every0 = steps / gcd(steps, 10);
    let mut levels: Vec<EquivalenceLevel> = Vec::with_capacity(eq.levels);
    for k in 0..eq.levels {
        let factor = refine >> k;
        let path = fine.coarsen(factor)?;
        let n = path.steps();
        let mut spec = run_spec(cfg, path.dt(), n, every0 << k);
        spec.scheme = Scheme::Direct;
        let a = integrate(&x0, &model, &path, &spec)?;
        spec.scheme = Scheme::Rescaled;
        let b = integrate(&x0, &model, &path, &spec)?;
        let disc = a
            .checkpoints
            .iter()
            .zip(&b.checkpoints)
            .map(|(p, q)| (&p.x - &q.x).h1_norm())
            .fold(0.0, f64::max);
        let ratio = levels.last().map(|l| l.discrepancy / disc);
        levels.push(EquivalenceLevel {
            dt: path.dt(),
            steps: n,
            discrepancy: disc,
            ratio,
        });
    }
    // refined restart at σ followed by its inverse, on the finest mesh
    let t_end = dt * steps as f64;
    let fine_dt = fine.dt();
    let sigma_steps =
        ((eq.sigma.unwrap_or(0.5 * t_end) / fine_dt).round() as usize).clamp(1, fine.steps() - 1);
    let sigma = sigma_steps as f64 * fine_dt;
    let mut spec = run_spec(cfg, fine_dt, sigma_steps, sigma_steps);
    spec.scheme = Scheme::Direct;
    let upto = integrate(&x0, &model, &fine, &spec)?;
    let at_sigma = to_rescaled(upto.final_state(), &model, &fine)?;
    let (restarted, _) = refined_restart(&at_sigma, sigma, &model, &fine)?;
    let back = restart_inverse(&restarted, sigma, &model, &fine)?;
    let identity_error = back.distance(&at_sigma) / at_sigma.energy_norm().max(f64::MIN_POSITIVE);

    let mut t = Table::new("equivalence", &["dt", "steps", "discrepancy", "ratio"]);
    for l in &levels {
        t.push(vec![
            num(l.dt),
            l.steps.to_string(),
            num(l.discrepancy),
            l.ratio.map(num).unwrap_or_default(),
        ]);
    }
    let agg = json!({ "restart_sigma": sigma, "restart_identity_error": identity_error, "base_seed": cfg.seed, "path_index": 0 });
    Ok(finish(cfg, to_values(&levels)?, agg, vec![t]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateTable {
    pub w2_sq: f64,
    pub grad_sq: f64,
    pub energy: f64,
    pub quarter_w2_sq: f64,
    /// `|e_Z(W,−W²) − ¼‖W²‖²|`.
    pub threshold_identity_gap: f64,
    /// `|‖∇W‖² − ‖W²‖²|`.
    pub gradient_identity_gap: f64,
    pub radial_residual: f64,
    pub torus_grid: Grid,
    pub torus_residual: f64,
    /// `W(L/2)/W(0)` on the torus box: the periodisation error indicator.
    pub periodization_ratio: f64,
    /// `max_λ |e_Z(W_λ) − e_Z(W)| / e_Z(W)` over `λ ∈ {½, 1, 2}`.
    pub scale_invariance_gap: f64,
}

/// Torus grid for the residual check: the configured grid when it is
/// four-dimensional, otherwise `16⁴` on a box where `W(L/2) ≤ 10⁻³ W(0)`.
fn torus_grid(cfg: &RunConfig) -> Result<Grid> {
    match cfg.grid {
        Some(g) if g.d == 4 => g.build(),
        _ => Grid::new(4, 16, box_length_for_tail(1.0, 1e-3)),
    }
}

pub fn ground_state_table(torus: Grid) -> Result<GroundStateTable> {
    let c = GroundConstants::get();
    let scale_invariance_gap = [0.5, 2.0]
        .iter()
        .map(|&l| (GroundState::new(l).energy_radial() - c.energy).abs() / c.energy)
        .fold(0.0, f64::max);
    let w = GroundState::new(1.0);
    Ok(GroundStateTable {
        w2_sq: c.w2_sq,
        grad_sq: c.grad_sq,
        energy: c.energy,
        quarter_w2_sq: c.quarter_w2_sq,
        threshold_identity_gap: (c.energy - c.quarter_w2_sq).abs(),
        gradient_identity_gap: (c.grad_sq - c.w2_sq).abs(),
        radial_residual: c.radial_residual,
        torus_grid: torus,
        torus_residual: ground_state_residual(1.0, torus)?,
        periodization_ratio: w.eval(0.5 * torus.length()) / w.eval(0.0),
        scale_invariance_gap,
    })
}

fn run_groundstate(cfg: &RunConfig) -> Result<RunOutput> {
    let table = ground_state_table(torus_grid(cfg)?)?;
    let energies: Vec<Value> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&l| json!({ "lambda": l, "energy": GroundState::new(l).energy_radial() }))
        .collect();
    Ok(finish(
        cfg,
        energies,
        serde_json::to_value(&table)?,
        Vec::new(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub spec_index: usize,
    pub family: String,
    pub lambda: Option<f64>,
    pub value: f64,
}

fn norms_block(cfg: &RunConfig, src: &BlockSource) -> Result<SpaceTimeBlock> {
    match src {
        BlockSource::File { path } => {
            load_block(path).map_err(|e| config_err("norms.block.path", e))
        }
        BlockSource::FreeSchrodinger { dt, m } => {
            let grid = cfg.grid()?;
            SpaceTimeBlock::free_schrodinger(&initial_state(cfg, grid)?.x, 0.0, *dt, *m)
                .map_err(|e| config_err("norms.block", e))
        }
        BlockSource::FreeWave { dt, m } => {
            let grid = cfg.grid()?;
            SpaceTimeBlock::free_wave(&initial_state(cfg, grid)?.y, 0.0, *dt, *m)
                .map_err(|e| config_err("norms.block", e))
        }
    }
}

fn run_norms(cfg: &RunConfig) -> Result<RunOutput> {
    let nc = cfg.norms.as_ref().expect("validated");
    let mut records = Vec::new();
    let mut tables = Vec::new();
    let mut agg = serde_json::Map::new();
    if let Some(src) = &nc.block {
        let block = norms_block(cfg, src)?;
        for (i, spec) in nc.specs.iter().enumerate() {
            for row in
                evaluate(spec, &block).map_err(|e| config_err(&format!("norms.specs[{i}]"), e))?
            {
                records.push(NormRecord {
                    spec_index: i,
                    family: row.family,
                    lambda: row.lambda,
                    value: row.value,
                });
            }
        }
        let mut t = Table::new("norms", &["spec_index", "family", "lambda", "value"]);
        for r in &records {
            t.push(vec![
                r.spec_index.to_string(),
                r.family.clone(),
                r.lambda.map(num).unwrap_or_default(),
                num(r.value),
            ]);
        }
        tables.push(t);
    }
    if let Some(sw) = &nc.sweep {
        let spec = SweepSpec {
            grid: cfg.grid()?,
            dt: sw.dt,
            m: sw.m,
            samples: sw.samples,
            seed: cfg.seed,
            options: NormOptions::default(),
            estimates: sw.estimates.clone(),
        };
        let table = estimate_constant_sweep(&spec).map_err(|e| config_err("norms.sweep", e))?;
        let mut t = Table::new(
            "constants",
            &["estimate", "param", "samples", "max", "median"],
        );
        for r in &table.rows {
            t.push(vec![
                r.estimate.clone(),
                r.param.map(num).unwrap_or_default(),
                r.samples.to_string(),
                num(r.max),
                num(r.median),
            ]);
        }
        tables.push(t);
        agg.insert("constants".into(), serde_json::to_value(&table.rows)?);
        agg.insert("slopes".into(), serde_json::to_value(&table.slopes)?);
    }
    Ok(finish(
        cfg,
        to_values(&records)?,
        Value::Object(agg),
        tables,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRecord {
    pub measure: String,
    pub param: Option<f64>,
    pub value: f64,
}

/// Read `t, x` rows; a non-numeric first line is treated as a header.
pub fn read_path_csv(path: &std::path::Path) -> Result<SampledPath> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let (mut ts, mut xs) = (Vec::new(), Vec::new());
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let parsed: Option<(f64, f64)> =
            (|| Some((rec.get(0)?.parse().ok()?, rec.get(1)?.parse().ok()?)))();
        match parsed {
            Some((t, x)) => {
                ts.push(t);
                xs.push(x);
            }
            None if i == 0 => {}
            None => {
                return Err(ZlabError::Format(format!(
                    "line {}: expected two numbers",
                    i + 1
                )))
            }
        }
    }
    SampledPath::from_real(ts, &xs)
}

fn source_path(cfg: &RunConfig, src: &PathSource) -> Result<SampledPath> {
    let key = NoiseKey::new(cfg.seed, 0);
    match src {
        PathSource::Gbm { c, dt, horizon } => Ok(gbm_path(key, *c, *dt, *horizon)
            .map_err(|e| config_err("variation.source", e))?
            .0),
        PathSource::Bm { dt, horizon } => Ok(gbm_path(key, 0.0, *dt, *horizon)
            .map_err(|e| config_err("variation.source", e))?
            .1),
        PathSource::Csv { file } => {
            read_path_csv(file).map_err(|e| config_err("variation.source.file", e))
        }
    }
}

fn run_variation(cfg: &RunConfig) -> Result<RunOutput> {
    let vc = cfg.variation.as_ref().expect("validated");
    let mut records = Vec::new();
    let mut tables = Vec::new();
    let mut agg = serde_json::Map::new();
    if let Some(src) = &vc.source {
        let path = source_path(cfg, src)?;
        let mut push = |measure: &str, param: Option<f64>, value: f64| {
            records.push(MeasureRecord {
                measure: measure.into(),
                param,
                value,
            });
        };
        for &p in &vc.p {
            push("p_variation", Some(p), p_variation(&path, p)?);
            push("vp_norm", Some(p), vp_norm(&path, p)?);
        }
        if let Some(a) = vc.hoelder {
            push("hoelder", Some(a), hoelder_norm(&path, a, None)?);
        }
        if let Some(b) = vc.besov {
            push(
                "besov",
                Some(b.s),
                besov_time_norm(&path, b.s, b.p, b.q, &BesovOptions::default())?,
            );
        }
        push("l6", None, l6_norm(&path));
        let mut t = Table::new("measures", &["measure", "param", "value"]);
        for r in &records {
            t.push(vec![
                r.measure.clone(),
                r.param.map(num).unwrap_or_default(),
                num(r.value),
            ]);
        }
        tables.push(t);
    }
    if let Some(v) = &vc.vp_experiment {
        let e = gbm_vp_experiment(v.c, v.p, &v.horizons, cfg.paths, v.dt, cfg.seed)
            .map_err(|e| config_err("variation.vp_experiment", e))?;
        let mut t = Table::new(
            "vp_table",
            &["horizon", "median_h", "q90_h", "median_beta", "q90_beta"],
        );
        for r in &e.rows {
            t.push(vec![
                num(r.horizon),
                num(r.median_h),
                num(r.q90_h),
                num(r.median_beta),
                num(r.q90_beta),
            ]);
        }
        tables.push(t);
        agg.insert("vp_experiment".into(), serde_json::to_value(&e)?);
    }
    if let Some(v) = &vc.tail_experiment {
        let e = gbm_tail_experiment(&v.c_list, v.c_prime, cfg.paths, v.dt, v.horizon, cfg.seed)
            .map_err(|e| config_err("variation.tail_experiment", e))?;
        let mut t = Table::new("tail_table", &["c", "p_exceed", "se", "median"]);
        for r in &e.rows {
            t.push(vec![num(r.c), num(r.p_exceed), num(r.se), num(r.median)]);
        }
        tables.push(t);
        agg.insert("tail_experiment".into(), serde_json::to_value(&e)?);
    }
    Ok(finish(
        cfg,
        to_values(&records)?,
        Value::Object(agg),
        tables,
    ))
}
