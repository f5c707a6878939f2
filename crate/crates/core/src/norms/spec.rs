//! Declarative norm requests, as read from run configurations.

use serde::{Deserialize, Serialize};

use super::adapted::{
    d_norm, g_norm_upper, n_norm, n_pieces, s_norm, s_pieces, wave_norm, wave_pieces, x_norm_band,
    x_pieces, NormOptions, Regime,
};
use super::lateral::lateral_norm;
use crate::error::{Result, ZlabError};
use crate::spectral::{SpaceTimeBlock, TemporalMode, DEFAULT_K};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormFamily {
    S,
    N,
    Wave,
    X,
    G,
    D,
    Lateral,
}

impl NormFamily {
    pub fn name(self) -> &'static str {
        match self {
            NormFamily::S => "S",
            NormFamily::N => "N",
            NormFamily::Wave => "W",
            NormFamily::X => "X",
            NormFamily::G => "G",
            NormFamily::D => "D",
            NormFamily::Lateral => "lateral",
        }
    }

    fn dyadic(self) -> bool {
        matches!(
            self,
            NormFamily::S | NormFamily::N | NormFamily::Wave | NormFamily::X
        )
    }
}

fn default_regime() -> Regime {
    Regime::Energy
}

fn default_k() -> f64 {
    DEFAULT_K
}

fn default_taper() -> Option<f64> {
    Some(0.25)
}

fn default_two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub family: NormFamily,
    #[serde(default = "default_regime")]
    pub regime: Regime,
    /// Dyadic frequencies to report; empty means the whole ladder.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_taper")]
    pub taper: Option<f64>,
    #[serde(default)]
    pub mode: TemporalMode,
    /// Axis of the lateral norm.
    #[serde(default)]
    pub axis: usize,
    #[serde(default = "default_two")]
    pub p: f64,
    #[serde(default = "default_two")]
    pub q: f64,
}

impl NormSpec {
    pub fn new(family: NormFamily) -> Self {
        Self {
            family,
            regime: Regime::Energy,
            lambdas: Vec::new(),
            k: DEFAULT_K,
            taper: default_taper(),
            mode: TemporalMode::ZeroPad,
            axis: 0,
            p: 2.0,
            q: 2.0,
        }
    }

    pub fn options(&self) -> NormOptions {
        NormOptions {
            k: self.k,
            taper: self.taper,
            mode: self.mode,
        }
    }
}

/// One reported value; `lambda = None` marks an assembled (total) norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub family: String,
    pub lambda: Option<f64>,
    pub value: f64,
}

/// Evaluate a norm request: per-band rows followed by the total for the
/// dyadic families, a single row otherwise.
pub fn evaluate(spec: &NormSpec, block: &SpaceTimeBlock) -> Result<Vec<NormRow>> {
    let o = spec.options();
    let name = spec.family.name().to_string();
    let row = |lambda, value| NormRow {
        family: name.clone(),
        lambda,
        value,
    };
    if spec.family.dyadic() {
        let (pieces, one): (
            fn(&SpaceTimeBlock, Regime, &NormOptions) -> Result<Vec<(f64, f64)>>,
            _,
        ) = match spec.family {
            NormFamily::S => (
                s_pieces,
                s_norm as fn(&SpaceTimeBlock, f64, Regime, &NormOptions) -> Result<f64>,
            ),
            NormFamily::N => (n_pieces, n_norm as _),
            NormFamily::Wave => (wave_pieces, wave_norm as _),
            _ => (x_pieces, x_norm_band as _),
        };
        if spec.lambdas.is_empty() {
            let all = pieces(block, spec.regime, &o)?;
            let total = all.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            let mut rows: Vec<NormRow> = all.into_iter().map(|(l, v)| row(Some(l), v)).collect();
            rows.push(row(None, total));
            Ok(rows)
        } else {
            spec.lambdas
                .iter()
                .map(|&l| Ok(row(Some(l), one(block, l, spec.regime, &o)?)))
                .collect()
        }
    } else {
        let value = match spec.family {
            NormFamily::G => g_norm_upper(block, spec.regime, &o)?.value,
            NormFamily::D => d_norm(block, &o)?,
            _ => {
                if spec.axis >= block.grid().d() {
                    return Err(ZlabError::InvalidArgument(format!(
                        "lateral axis {} out of range for d = {}",
                        spec.axis,
                        block.grid().d()
                    )));
                }
                if !(spec.p >= 1.0 && spec.q >= 1.0) {
                    return Err(ZlabError::InvalidArgument(
                        "lateral exponents must be ≥ 1".into(),
                    ));
                }
                lateral_norm(block, spec.axis, spec.p, spec.q)
            }
        };
        Ok(vec![row(None, value)])
    }
}
