use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Curvature energy `∫R² dV` of one standard bubble in dimension 4: `384 π²`.
pub const BUBBLE_ENERGY_4D: f64 = 384.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Tunable thresholds standing in for the existential constants of the
/// compactness argument. Defaults follow the calibration in
/// `scripts/calibrate_thresholds.py`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    /// Concentration threshold on `∫_{B_r} R² dV`.
    pub eps_detect: f64,
    /// Mean-oscillation threshold of `log u` for the John-Nirenberg radius.
    pub eps_jn: f64,
    /// Band length of the three-circles test.
    pub band_l: f64,
    /// Sobolev exponent in (1, 2).
    pub p_sobolev: f64,
    /// Closeness tolerance of a metric to the model cylinder metric.
    pub metric_tol: f64,
    /// Lower ratio bound for essentially-same blowup sequences.
    pub d: f64,
    /// Upper ratio bound for essentially-same blowup sequences.
    pub d_prime: f64,
    /// Offset bound (in units of the scales) for essentially-same sequences.
    pub d_double_prime: f64,
    /// Curvature-energy hypothesis threshold of the three-circles test.
    pub eps_three_circles: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            eps_detect: 0.05 * BUBBLE_ENERGY_4D,
            eps_jn: 0.1,
            band_l: 1.0,
            p_sobolev: 1.5,
            metric_tol: 1e-3,
            d: 0.1,
            d_prime: 10.0,
            d_double_prime: 3.0,
            eps_three_circles: 0.05 * BUBBLE_ENERGY_4D,
        }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_detect", self.eps_detect),
            ("eps_jn", self.eps_jn),
            ("band_l", self.band_l),
            ("p_sobolev", self.p_sobolev),
            ("metric_tol", self.metric_tol),
            ("d", self.d),
            ("d_prime", self.d_prime),
            ("d_double_prime", self.d_double_prime),
            ("eps_three_circles", self.eps_three_circles),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("threshold {name} must be positive, got {v}")));
            }
        }
        if !(self.p_sobolev > 1.0 && self.p_sobolev < 2.0) {
            return Err(Error::Config(format!("p_sobolev must lie in (1, 2), got {}", self.p_sobolev)));
        }
        if self.d >= self.d_prime {
            return Err(Error::Config(format!("need d < d_prime, got {} >= {}", self.d, self.d_prime)));
        }
        Ok(())
    }
}
