//! Bubble analysis: concentration of curvature energy, blowup rescaling,
//! classification of blowup sequences, necks and band-energy decay on
//! cylinders.
//!
//! Limits along the family are replaced by finite-tail statistics: the
//! "liminf over k" is the minimum over the last quarter of the indices, and
//! "lim over r" is the smallest tested radius.

mod blowup;
mod circles;
mod concentration;
mod neck;
mod report;

pub use blowup::{
    blowup_energy_check, blowup_rescale, classify_pair, is_real_bubble, unit_ball_stats, BlowupSequence, EnergyCheck,
    PairClass, RealBubbleFloors,
};
pub use circles::{band_energies, singularity_decay_profile, three_circles_check, DecayProfile, ThreeCirclesVerdict};
pub use concentration::{
    concentration_scan, energy_density, first_concentration_scale, first_concentration_scale_among, ConcentrationProfile, ConcentrationScale,
    ConcentrationScan,
};
pub use neck::{annulus, fitted_shape_constant, neck_stats, NeckStats};
pub use report::{write_concentration_csv, BubbleReport, NeckEntry, PairEntry};

use serde::{Deserialize, Serialize};

/// Half-open index range `[start, end)` of a family's tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailWindow {
    pub start: usize,
    pub end: usize,
}

impl TailWindow {
    /// The last `ceil(len / 4)` indices (at least one).
    pub fn last_quarter(len: usize) -> Self {
        let width = len.div_ceil(4).max(1).min(len.max(1));
        TailWindow {
            start: len.saturating_sub(width),
            end: len,
        }
    }

    /// Minimum of `xs` over the window (the finite-tail liminf).
    pub fn min_of(&self, xs: &[f64]) -> f64 {
        xs[self.start..self.end].iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Least-squares line through `(i, ys[i])`: `(slope, intercept)`.
pub(crate) fn fit_line(ys: &[f64]) -> (f64, f64) {
    let n = ys.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}
