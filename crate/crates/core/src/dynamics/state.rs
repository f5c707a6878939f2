use serde::{Deserialize, Serialize};

use crate::error::{Result, ZlabError};
use crate::spectral::{Field, Grid};

/// Which unknowns a state carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// `(X, Y)` of the stochastic system.
    Direct,
    /// `(u, v) = (e^{−W₁}X, Y − 𝒯_t(W₂))`.
    RescaledConservative,
    /// `(z, v) = (e^{μ̂t − W₁}X, Y)`.
    RescaledNonconservative,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Direct => "direct",
            Frame::RescaledConservative => "rescaled_conservative",
            Frame::RescaledNonconservative => "rescaled_nonconservative",
        }
    }
}

/// Schrödinger component `x`, wave component `y`, time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZakharovState {
    pub x: Field,
    pub y: Field,
    pub t: f64,
    pub frame: Frame,
}

impl ZakharovState {
    pub fn new(x: Field, y: Field, t: f64, frame: Frame) -> Result<Self> {
        x.check_grid(&y)?;
        Ok(Self { x, y, t, frame })
    }

    /// Direct-frame state at `t = 0`.
    pub fn direct(x: Field, y: Field) -> Result<Self> {
        Self::new(x, y, 0.0, Frame::Direct)
    }

    pub fn grid(&self) -> &Grid {
        self.x.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// `‖x‖_{H¹} + ‖y‖_{L²}`.
    pub fn energy_norm(&self) -> f64 {
        self.x.h1_norm() + self.y.l2_norm()
    }

    /// `‖x − x'‖_{H¹} + ‖y − y'‖_{L²}`.
    pub fn distance(&self, other: &ZakharovState) -> f64 {
        (&self.x - &other.x).h1_norm() + (&self.y - &other.y).l2_norm()
    }

    pub fn expect_frame(&self, frame: Frame) -> Result<()> {
        if self.frame == frame {
            Ok(())
        } else {
            Err(ZlabError::FrameMismatch {
                expected: frame.name().into(),
                found: self.frame.name().into(),
            })
        }
    }
}
