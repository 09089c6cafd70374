//! The Yamabe constant of the round sphere and the heat-invariant threshold.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bubble::TailWindow;
use crate::conformal::{heat_invariants, ConformalField, HeatInvariants};
use crate::error::{Error, Result};
use crate::grid::GridManifold;

/// `Y(S^n) = n (n-1) Vol(S^n)^{2/n}` for the unit round sphere.
pub fn yamabe_constant(n: usize) -> Result<f64> {
    let vol = match n {
        3 => 2.0 * PI * PI,
        4 => 8.0 * PI * PI / 3.0,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "yamabe_constant supports n = 3 and n = 4, got {n}"
            )))
        }
    };
    Ok((n * (n - 1)) as f64 * vol.powf(2.0 / n as f64))
}

/// `a1/sqrt(a0)` along a family against two thresholds: `Y(S^n)` itself and
/// `Y(S^n)/6`, the value a round bubble attains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub dim: usize,
    pub ratios: Vec<f64>,
    pub tail: TailWindow,
    /// Minimum of the ratio over the tail.
    pub tail_liminf: f64,
    pub yamabe: f64,
    pub yamabe_over_6: f64,
    pub below_yamabe: bool,
    pub below_yamabe_over_6: bool,
    /// `tail_liminf / Y(S^n)`.
    pub relative_to_yamabe: f64,
    /// `tail_liminf / (Y(S^n) / 6)`.
    pub relative_to_yamabe_over_6: f64,
}

impl ThresholdReport {
    pub fn from_invariants(n: usize, invariants: &[HeatInvariants]) -> Result<Self> {
        if invariants.is_empty() {
            return Err(Error::InvalidArgument("threshold check needs a nonempty family".into()));
        }
        let yamabe = yamabe_constant(n)?;
        let ratios: Vec<f64> = invariants.iter().map(HeatInvariants::a1_over_sqrt_a0).collect();
        let tail = TailWindow::last_quarter(ratios.len());
        let tail_liminf = tail.min_of(&ratios);
        Ok(ThresholdReport {
            dim: n,
            tail,
            tail_liminf,
            yamabe,
            yamabe_over_6: yamabe / 6.0,
            below_yamabe: tail_liminf < yamabe,
            below_yamabe_over_6: tail_liminf < yamabe / 6.0,
            relative_to_yamabe: tail_liminf / yamabe,
            relative_to_yamabe_over_6: tail_liminf / (yamabe / 6.0),
            ratios,
        })
    }
}

/// Heat invariants of every member and the threshold comparison.
pub fn threshold_check(m: &GridManifold, family: &[ConformalField]) -> Result<(Vec<HeatInvariants>, ThresholdReport)> {
    let inv = family
        .par_iter()
        .map(|u| heat_invariants(m, u))
        .collect::<Result<Vec<_>>>()?;
    let report = ThresholdReport::from_invariants(m.dim(), &inv)?;
    Ok((inv, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_torus;

    #[test]
    fn closed_forms() {
        assert!((yamabe_constant(4).unwrap() - 61.5625).abs() < 1e-3);
        // 6 (2π²)^{2/3}
        assert!((yamabe_constant(3).unwrap() - 43.8231).abs() < 1e-3);
        assert!(yamabe_constant(5).is_err());
        assert!(yamabe_constant(2).is_err());
    }

    #[test]
    fn flat_family_is_below_both() {
        let m = build_torus(4, 2.0, 6).unwrap();
        let fam: Vec<_> = (0..4).map(|k| ConformalField::constant(&m, 1.0 + k as f64).unwrap()).collect();
        let (_, r) = threshold_check(&m, &fam).unwrap();
        assert!(r.ratios.iter().all(|&q| q == 0.0));
        assert!(r.below_yamabe && r.below_yamabe_over_6);
        assert_eq!(r.tail, TailWindow { start: 3, end: 4 });
    }
}
