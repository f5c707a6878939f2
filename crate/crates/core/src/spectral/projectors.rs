//! Littlewood-Paley and lateral projectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::ladder::{chi_low, lateral_phi, DyadicLadder};
use super::ops::{apply_multiplier, apply_radial};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjKind {
    /// `P_λ` (`P_{≤1}` for `λ = 1`).
    Band,
    /// `P_{≤λ}`.
    Low,
    /// `P_{>λ} = I − P_{≤λ}`.
    High,
    /// `P_{λ/2} + P_λ + P_{2λ}`, restricted to the ladder.
    Fattened,
}

/// Radial profile of a projector, validated against the ladder.
pub fn lp_profile(
    ladder: &DyadicLadder,
    lambda: f64,
    kind: ProjKind,
) -> Result<Box<dyn Fn(f64) -> f64>> {
    match kind {
        ProjKind::Band => {
            ladder.check_band(lambda)?;
            let l = ladder.clone();
            Ok(Box::new(move |r| l.band(lambda, r)))
        }
        ProjKind::Low => {
            ladder.check_threshold(lambda)?;
            Ok(Box::new(move |r| chi_low(lambda, r)))
        }
        ProjKind::High => {
            ladder.check_threshold(lambda)?;
            Ok(Box::new(move |r| 1.0 - chi_low(lambda, r)))
        }
        ProjKind::Fattened => {
            ladder.check_band(lambda)?;
            let l = ladder.clone();
            let bands: Vec<f64> = [0.5 * lambda, lambda, 2.0 * lambda]
                .into_iter()
                .filter(|&m| m >= 1.0 && m <= l.top())
                .collect();
            Ok(Box::new(move |r| bands.iter().map(|&m| l.band(m, r)).sum()))
        }
    }
}

/// Littlewood-Paley projection of `f`.
pub fn lp_project(f: &Field, lambda: f64, kind: ProjKind) -> Result<Field> {
    let ladder = DyadicLadder::for_grid(f.grid());
    let prof = lp_profile(&ladder, lambda, kind)?;
    Ok(apply_radial(f, |r| Complex64::new(prof(r), 0.0)))
}

/// `P_{N,e}`: multiplier `φ(ξ_e / N)` along coordinate axis `axis`.
pub fn lateral_project(f: &Field, n: f64, axis: usize) -> Field {
    apply_multiplier(f, |k| Complex64::new(lateral_phi(k[axis] / n), 0.0))
}

/// Angular decomposition `P_N f = Σ_j P_{N,e_j} Π_{l<j}(1 − P_{N,e_l}) P_N f`.
///
/// Exact for `N ≥ 2`: on the annulus `N/2 < |ξ| < 2N` some coordinate
/// satisfies `N/4 < |ξ_j| < 2N`, where the lateral profile equals one.
pub fn decompose_angular(f: &Field, n: f64) -> Result<Vec<Field>> {
    let ladder = DyadicLadder::for_grid(f.grid());
    ladder.check_band(n)?;
    let d = f.grid().d();
    let band = apply_radial(f, |r| Complex64::new(ladder.band(n, r), 0.0));
    Ok((0..d)
        .map(|j| {
            apply_multiplier(&band, |k| {
                let mut m = lateral_phi(k[j] / n);
                for &kl in &k[..j] {
                    m *= 1.0 - lateral_phi(kl / n);
                }
                Complex64::new(m, 0.0)
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, Rep};

    #[test]
    fn plane_wave_passes_matching_band() {
        // |ξ| = 4 exactly: L = 2π so dk = 1
        let g = Grid::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        let f = Field::plane_wave(g, &[4, 0]);
        let p = lp_project(&f, 4.0, ProjKind::Band).unwrap();
        assert!(p.rel_diff(&f) < 1e-12);
        let q = lp_project(&f, 16.0, ProjKind::Band).unwrap();
        assert!(q.l2_norm() < 1e-12);
    }

    #[test]
    fn rejects_beyond_top() {
        let g = Grid::new(2, 8, 2.0 * std::f64::consts::PI).unwrap();
        let f = Field::zeros(g, Rep::Physical);
        assert!(lp_project(&f, 64.0, ProjKind::Band).is_err());
    }

    #[test]
    fn low_plus_high_is_identity() {
        let g = Grid::new(2, 16, 5.0).unwrap();
        let f = Field::from_real_fn(g, |x| (x[0] * 3.0).sin() + x[1].cos() * x[0]);
        let lo = lp_project(&f, 2.0, ProjKind::Low).unwrap();
        let hi = lp_project(&f, 2.0, ProjKind::High).unwrap();
        assert!((&lo + &hi).rel_diff(&f) < 1e-13);
    }
}
