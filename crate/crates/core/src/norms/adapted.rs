//! Dyadic adapted norms on space-time blocks.
//!
//! Every per-frequency norm applies `P_λ` itself, so callers pass the raw
//! block. Blocks are tapered in time first (see [`NormOptions`]) because the
//! temporal multipliers see the window edges as jumps otherwise.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lateral::lateral_norm;
use crate::error::{Result, ZlabError};
use crate::spectral::{
    apply_radial, bessel_pow, chi_low, lateral_phi, BandKind, DyadicLadder, SpaceTimeBlock,
    TemporalMode, DEFAULT_K, MIN_TEMPORAL_SAMPLES,
};

/// The two regularity regimes in use.
///
/// `Energy` pairs `(s, a) = (1, ¼)` for the Schrödinger norms with
/// `(α, β) = (¼, ½)` for the wave norm; `Endpoint` pairs `(½, 0)` with `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Energy,
    Endpoint,
}

impl Regime {
    pub fn s(self) -> f64 {
        match self {
            Regime::Energy => 1.0,
            Regime::Endpoint => 0.5,
        }
    }

    pub fn a(self) -> f64 {
        match self {
            Regime::Energy => 0.25,
            Regime::Endpoint => 0.0,
        }
    }

    /// Wave parameters `(α, β)`.
    pub fn wave_params(self) -> (f64, f64) {
        match self {
            Regime::Energy => (0.25, 0.5),
            Regime::Endpoint => (0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormOptions {
    /// Projector constant: modulation and temporal cut-offs sit at `(λ/K)²`.
    pub k: f64,
    /// Tukey taper fraction applied before evaluation; `None` evaluates the raw block.
    pub taper: Option<f64>,
    pub mode: TemporalMode,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            taper: Some(0.25),
            mode: TemporalMode::ZeroPad,
        }
    }
}

impl NormOptions {
    /// No taper, zero padding.
    pub fn raw() -> Self {
        Self {
            taper: None,
            ..Self::default()
        }
    }

    pub fn ladder(&self, block: &SpaceTimeBlock) -> DyadicLadder {
        DyadicLadder::with_k(block.grid(), self.k)
    }

    /// Validate and taper.
    pub fn prepare(&self, block: &SpaceTimeBlock) -> Result<SpaceTimeBlock> {
        if block.len() < MIN_TEMPORAL_SAMPLES {
            return Err(ZlabError::BlockTooShort {
                needed: MIN_TEMPORAL_SAMPLES,
                got: block.len(),
            });
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(ZlabError::InvalidArgument(format!(
                "projector constant {} must be positive",
                self.k
            )));
        }
        Ok(match self.taper {
            Some(f) if f > 0.0 => block.taper(f),
            _ => block.clone(),
        })
    }

    fn cutoff(&self, lambda: f64) -> f64 {
        (lambda / self.k).powi(2)
    }
}

/// `((λ + |τ|)/(λ² + |τ|))^a`.
fn modulation_weight(lambda: f64, tau: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        ((lambda + tau.abs()) / (lambda * lambda + tau.abs())).powf(a)
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `P_λ` applied snapshot by snapshot.
fn band_project(b: &SpaceTimeBlock, ladder: &DyadicLadder, lambda: f64) -> SpaceTimeBlock {
    b.map_snapshots(|f| apply_radial(f, |r| re(ladder.band(lambda, r))).physical())
}

// Per-band pieces acting on already prepared blocks.

fn s_piece(
    b: &SpaceTimeBlock,
    o: &NormOptions,
    ladder: &DyadicLadder,
    lambda: f64,
    reg: Regime,
) -> Result<f64> {
    let (s, a) = (reg.s(), reg.a());
    let ul = band_project(b, ladder, lambda);
    let sup = ul.linf_l2();
    let strichartz = match reg {
        Regime::Energy => ul
            .modulation_project(o.cutoff(lambda), BandKind::Low, o.mode)?
            .mixed_norm(2.0, 4.0),
        Regime::Endpoint => ul.mixed_norm(2.0, 4.0),
    };
    let op = ul
        .spacetime_multiplier(o.mode, |tau, r| {
            re(-(tau + r * r) * modulation_weight(lambda, tau, a))
        })?
        .l2_l2();
    Ok(lambda.powf(s) * (sup + strichartz) + lambda.powf(s - 1.0) * op)
}

fn n_piece(
    b: &SpaceTimeBlock,
    o: &NormOptions,
    ladder: &DyadicLadder,
    lambda: f64,
    reg: Regime,
) -> Result<f64> {
    let (s, a) = (reg.s(), reg.a());
    let cut = o.cutoff(lambda);
    let low = b
        .spacetime_multiplier(o.mode, |tau, r| {
            re(ladder.band(lambda, r) * chi_low(cut, (tau + r * r).abs()))
        })?
        .mixed_norm(2.0, 4.0 / 3.0);
    let l2 = b
        .spacetime_multiplier(o.mode, |tau, r| {
            re(ladder.band(lambda, r) * modulation_weight(lambda, tau, a))
        })?
        .l2_l2();
    Ok(lambda.powf(s) * low + lambda.powf(s - 1.0) * l2)
}

fn w_piece(
    b: &SpaceTimeBlock,
    o: &NormOptions,
    ladder: &DyadicLadder,
    lambda: f64,
    reg: Regime,
) -> Result<f64> {
    let (alpha, beta) = reg.wave_params();
    let cut = o.cutoff(lambda);
    let vl = band_project(b, ladder, lambda);
    let sup = vl.linf_l2();
    let temporal = vl
        .spacetime_multiplier(o.mode, |tau, _| {
            re((lambda + tau.abs()).powf(alpha) * chi_low(cut, tau.abs()))
        })?
        .linf_l2();
    let op = vl
        .spacetime_multiplier(o.mode, |tau, r| re(r - tau))?
        .l2_l2();
    Ok(sup + lambda.powf(-alpha) * temporal + lambda.powf(beta - 1.0) * op)
}

fn x_piece(
    b: &SpaceTimeBlock,
    o: &NormOptions,
    ladder: &DyadicLadder,
    lambda: f64,
    reg: Regime,
) -> Result<f64> {
    let mut total = s_piece(b, o, ladder, lambda, reg)?;
    if lambda > 1.0 {
        let cut = o.cutoff(lambda);
        for j in 0..b.grid().d() {
            let piece = b.spacetime_multiplier_vec(o.mode, |tau, k| {
                let r2: f64 = k.iter().map(|v| v * v).sum();
                re(ladder.band(lambda, r2.sqrt())
                    * chi_low(cut, (tau + r2).abs())
                    * lateral_phi(k[j] / lambda))
            })?;
            total += lambda.powf(reg.s() + 0.5) * lateral_norm(&piece, j, f64::INFINITY, 2.0);
        }
    }
    Ok(total)
}

type Piece = fn(&SpaceTimeBlock, &NormOptions, &DyadicLadder, f64, Regime) -> Result<f64>;

fn single(
    block: &SpaceTimeBlock,
    lambda: f64,
    reg: Regime,
    o: &NormOptions,
    piece: Piece,
) -> Result<f64> {
    let ladder = o.ladder(block);
    ladder.check_band(lambda)?;
    let b = o.prepare(block)?;
    piece(&b, o, &ladder, lambda, reg)
}

/// Per-band values over the whole ladder, in ladder order.
fn all_pieces(
    block: &SpaceTimeBlock,
    reg: Regime,
    o: &NormOptions,
    piece: Piece,
) -> Result<Vec<(f64, f64)>> {
    let ladder = o.ladder(block);
    let b = o.prepare(block)?;
    ladder
        .lambdas()
        .into_iter()
        .map(|l| Ok((l, piece(&b, o, &ladder, l, reg)?)))
        .collect()
}

fn l2_assemble(pieces: &[(f64, f64)]) -> f64 {
    pieces.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
}

/// `‖P_λ u‖_{S^{s,a}_λ}`.
pub fn s_norm(block: &SpaceTimeBlock, lambda: f64, reg: Regime, o: &NormOptions) -> Result<f64> {
    single(block, lambda, reg, o, s_piece)
}

/// `‖u‖_{S^{s,a}}`: ℓ² sum over the ladder.
pub fn s_total(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<f64> {
    Ok(l2_assemble(&s_pieces(block, reg, o)?))
}

pub fn s_pieces(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<Vec<(f64, f64)>> {
    all_pieces(block, reg, o, s_piece)
}

/// `‖P_λ F‖_{N^{s,a}_λ}`.
pub fn n_norm(block: &SpaceTimeBlock, lambda: f64, reg: Regime, o: &NormOptions) -> Result<f64> {
    single(block, lambda, reg, o, n_piece)
}

pub fn n_total(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<f64> {
    Ok(l2_assemble(&n_pieces(block, reg, o)?))
}

pub fn n_pieces(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<Vec<(f64, f64)>> {
    all_pieces(block, reg, o, n_piece)
}

/// `‖P_λ v‖_{W^{0,α,β}_λ}`.
pub fn wave_norm(block: &SpaceTimeBlock, lambda: f64, reg: Regime, o: &NormOptions) -> Result<f64> {
    single(block, lambda, reg, o, w_piece)
}

pub fn wave_pieces(
    block: &SpaceTimeBlock,
    reg: Regime,
    o: &NormOptions,
) -> Result<Vec<(f64, f64)>> {
    all_pieces(block, reg, o, w_piece)
}

/// `‖v‖_{W^{0,α,β}}` over the full ladder, including the low block `λ = 1`
/// so the assembly is a norm on the grid.
pub fn wave_total(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<f64> {
    Ok(l2_assemble(&wave_pieces(block, reg, o)?))
}

/// `‖v‖_𝕐 = ‖v‖_{W^{0,¼,½}}`.
pub fn y_total(block: &SpaceTimeBlock, o: &NormOptions) -> Result<f64> {
    wave_total(block, Regime::Energy, o)
}

/// `‖P_λ u‖_{𝕏^s_λ}`: the adapted norm plus lateral smoothing terms for `λ > 1`.
pub fn x_norm_band(
    block: &SpaceTimeBlock,
    lambda: f64,
    reg: Regime,
    o: &NormOptions,
) -> Result<f64> {
    single(block, lambda, reg, o, x_piece)
}

pub fn x_pieces(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<Vec<(f64, f64)>> {
    all_pieces(block, reg, o, x_piece)
}

/// `‖u‖_{𝕏^s}`.
pub fn x_norm(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<f64> {
    Ok(l2_assemble(&x_pieces(block, reg, o)?))
}

/// One candidate splitting `F = F₁ + F₂` for the 𝔾 norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Splitting {
    /// `F₂ = 0`.
    Plain,
    /// `F₂ = Σ_{μ>1} C_{>(μ/K)²} P_μ F`: high modulations go to the lateral part.
    HighModulation,
    /// `F₂ = Σ_{μ>1} P_{μ,e_j} P_μ F` for one axis.
    Lateral { axis: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GNormReport {
    pub value: f64,
    pub best: Splitting,
    pub candidates: Vec<(Splitting, f64)>,
}

/// Upper bound for `‖F‖_{𝔾^s}`: the minimum over a fixed family of splittings.
pub fn g_norm_upper(block: &SpaceTimeBlock, reg: Regime, o: &NormOptions) -> Result<GNormReport> {
    let ladder = o.ladder(block);
    let f = o.prepare(block)?;
    let d = f.grid().d();
    let lambdas = ladder.lambdas();
    let highs: Vec<f64> = lambdas.iter().copied().filter(|&l| l > 1.0).collect();
    let k = o.k;

    let low = n_piece(&f, o, &ladder, 1.0, reg)?;
    let mut family = vec![Splitting::Plain, Splitting::HighModulation];
    family.extend((0..d).map(|axis| Splitting::Lateral { axis }));

    let mut candidates = Vec::with_capacity(family.len());
    for sp in family {
        let f2 = match sp {
            Splitting::Plain => None,
            Splitting::HighModulation => Some(f.spacetime_multiplier(o.mode, |tau, r| {
                let m: f64 = highs
                    .iter()
                    .map(|&mu| {
                        ladder.band(mu, r) * (1.0 - chi_low((mu / k).powi(2), (tau + r * r).abs()))
                    })
                    .sum();
                re(m)
            })?),
            Splitting::Lateral { axis } => Some(f.spacetime_multiplier_vec(o.mode, |_, kv| {
                let r = kv.iter().map(|v| v * v).sum::<f64>().sqrt();
                let m: f64 = highs
                    .iter()
                    .map(|&mu| ladder.band(mu, r) * lateral_phi(kv[axis] / mu))
                    .sum();
                re(m)
            })?),
        };
        let mut sq = low * low;
        match &f2 {
            None => {
                for &l in &highs {
                    sq += n_piece(&f, o, &ladder, l, reg)?.powi(2);
                }
            }
            Some(f2) => {
                let f1 = f.axpy(re(-1.0), f2)?;
                for &l in &highs {
                    sq += n_piece(&f1, o, &ladder, l, reg)?.powi(2);
                    let p2 = band_project(f2, &ladder, l);
                    let w = l.powf(2.0 * reg.s() - 1.0);
                    for j in 0..d {
                        sq += w * lateral_norm(&p2, j, 1.0, 2.0).powi(2);
                    }
                }
            }
        }
        candidates.push((sp, sq.sqrt()));
    }
    let (best, value) = candidates
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("family is nonempty");
    Ok(GNormReport {
        value,
        best,
        candidates,
    })
}

/// `‖u‖_D = ‖u‖_{L²_t W^{½,4}_x}`.
pub fn d_norm(block: &SpaceTimeBlock, o: &NormOptions) -> Result<f64> {
    let b = match o.taper {
        Some(f) if f > 0.0 => block.taper(f),
        _ => block.clone(),
    };
    let s: f64 = b
        .snapshots()
        .iter()
        .map(|u| bessel_pow(u, 0.5).physical().lp_norm(4.0).powi(2))
        .sum();
    Ok((s * b.dt()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Field, Grid};

    #[test]
    fn zero_block_has_zero_norms() {
        let g = Grid::new(2, 8, 6.0).unwrap();
        let b = SpaceTimeBlock::zeros(g, 0.0, 0.05, 8).unwrap();
        let o = NormOptions::default();
        for reg in [Regime::Energy, Regime::Endpoint] {
            assert_eq!(s_total(&b, reg, &o).unwrap(), 0.0);
            assert_eq!(n_total(&b, reg, &o).unwrap(), 0.0);
            assert_eq!(wave_total(&b, reg, &o).unwrap(), 0.0);
            assert_eq!(x_norm(&b, reg, &o).unwrap(), 0.0);
            assert_eq!(g_norm_upper(&b, reg, &o).unwrap().value, 0.0);
        }
        assert_eq!(d_norm(&b, &o).unwrap(), 0.0);
    }

    #[test]
    fn short_block_rejected() {
        let g = Grid::new(2, 8, 6.0).unwrap();
        let b = SpaceTimeBlock::zeros(g, 0.0, 0.05, 3).unwrap();
        assert!(matches!(
            s_total(&b, Regime::Energy, &NormOptions::default()),
            Err(ZlabError::BlockTooShort { .. })
        ));
    }

    #[test]
    fn band_beyond_ladder_rejected() {
        let g = Grid::new(2, 8, 6.0).unwrap();
        let b = SpaceTimeBlock::zeros(g, 0.0, 0.05, 8).unwrap();
        assert!(s_norm(&b, 1024.0, Regime::Energy, &NormOptions::default()).is_err());
        assert!(s_norm(&b, 3.0, Regime::Energy, &NormOptions::default()).is_err());
    }

    #[test]
    fn temporally_constant_wave_block_is_sup_dominated() {
        // λ = 1, constant-in-time v with ξ = 0: (i∂_t + |∇|)v = 0 away from the window edges
        let g = Grid::new(2, 8, 6.0).unwrap();
        let f = Field::constant(g, re(1.0));
        let snaps = vec![f; 16];
        let b = SpaceTimeBlock::from_snapshots(0.0, 0.1, &snaps).unwrap();
        let o = NormOptions {
            mode: TemporalMode::Periodic,
            taper: None,
            ..NormOptions::default()
        };
        let w = wave_norm(&b, 1.0, Regime::Endpoint, &o).unwrap();
        // sup term + temporal low-pass term (passes τ = 0) + operator term (zero)
        assert!((w - 2.0 * b.linf_l2()).abs() < 1e-10 * w);
    }
}
