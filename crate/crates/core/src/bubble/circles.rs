//! Band energies on the model cylinder `[0, 3L] x S³`: the three-circles
//! trichotomy and geometric decay towards a puncture.

use serde::{Deserialize, Serialize};

use crate::conformal::{ConformalField, ConformalMetric};
use crate::error::{Error, Result};
use crate::grid::{BandDecomposition, GridManifold, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeCirclesVerdict {
    /// `E_i = ∫_{Q_i} v² dV_q` for the first three bands.
    pub band_energies: [f64; 3],
    /// `∫_Q R² v⁴ dV_q` over the three bands.
    pub curvature_energy: f64,
    /// The base metric is the exact product metric (closeness certified).
    pub metric_certified: bool,
    pub hypothesis_met: bool,
    /// Clause (1): `E1 <= e^{-L} E2` implies `E2 <= e^{-L} E3`.
    pub clause1: bool,
    /// Clause (2): `E2 >= e^{-L} E3` implies `E1 >= e^{-L} E2`.
    pub clause2: bool,
    /// Clause (3) as stated: `E1 <= e^{-L} E2` or `E2 <= e^{-L} E1`.
    pub trichotomy_holds: bool,
    /// Symmetric variant: `E2 <= e^{-L} E1` or `E2 <= e^{-L} E3`.
    pub symmetric_trichotomy: bool,
}

impl ThreeCirclesVerdict {
    pub fn implications_hold(&self) -> bool {
        self.clause1 && self.clause2
    }
}

fn check_cylinder(cyl: &GridManifold, bands: &BandDecomposition, v: &ConformalField, min_bands: usize) -> Result<()> {
    if cyl.topology() != Topology::CylinderS3 {
        return Err(Error::Unsupported {
            op: "band energies",
            topology: cyl.topology().name(),
        });
    }
    if bands.len() < min_bands {
        return Err(Error::InvalidArgument(format!("need at least {min_bands} bands, got {}", bands.len())));
    }
    if v.len() != cyl.len() {
        return Err(Error::FieldLength {
            expected: cyl.len(),
            got: v.len(),
        });
    }
    Ok(())
}

/// `∫_{Q_i} v² dV_q` for every band.
pub fn band_energies(cyl: &GridManifold, bands: &BandDecomposition, v: &ConformalField) -> Result<Vec<f64>> {
    check_cylinder(cyl, bands, v, 1)?;
    let w = cyl.vertex_volume();
    let vals = v.values();
    Ok(bands
        .bands
        .iter()
        .map(|b| b.iter().map(|&i| vals[i] * vals[i] * w[i]).sum())
        .collect())
}

pub fn three_circles_check(
    cyl: &GridManifold,
    bands: &BandDecomposition,
    v: &ConformalField,
    l: f64,
    eps: f64,
) -> Result<ThreeCirclesVerdict> {
    check_cylinder(cyl, bands, v, 3)?;
    let e = band_energies(cyl, bands, v)?;
    let (e1, e2, e3) = (e[0], e[1], e[2]);
    let g = ConformalMetric::new(cyl, v)?;
    // dV_g = v⁴ dV_q, so ∫ R² v⁴ dV_q = ∫ R² dV_g.
    let curvature_energy: f64 = bands.bands[..3]
        .iter()
        .flatten()
        .map(|&i| g.curvature.values[i].powi(2) * g.vertex_volume[i])
        .sum();
    let q = (-l).exp();
    let metric_certified = true;
    Ok(ThreeCirclesVerdict {
        band_energies: [e1, e2, e3],
        curvature_energy,
        metric_certified,
        hypothesis_met: metric_certified && curvature_energy < eps,
        clause1: !(e1 <= q * e2) || e2 <= q * e3,
        clause2: !(e2 >= q * e3) || e1 >= q * e2,
        trichotomy_holds: e1 <= q * e2 || e2 <= q * e1,
        symmetric_trichotomy: e2 <= q * e1 || e2 <= q * e3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub energies: Vec<f64>,
    /// Fitted ratio `E_{i+1} / E_i` (least squares on `ln E_i`).
    pub rate: f64,
    /// `rate >= 1`: the energies do not decay.
    pub growth: bool,
    pub p: f64,
    /// `Σ E_i^{p/4}` over the computed bands.
    pub partial_sum: f64,
    /// Partial sum plus the geometric tail implied by the fitted rate
    /// (infinite when the rate is not below 1).
    pub series_bound: f64,
    pub summable: bool,
}

/// Band energies over all bands and their fitted geometric decay.
pub fn singularity_decay_profile(cyl: &GridManifold, bands: &BandDecomposition, v: &ConformalField, p: f64) -> Result<DecayProfile> {
    check_cylinder(cyl, bands, v, 4)?;
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("exponent p must be positive, got {p}")));
    }
    let energies = band_energies(cyl, bands, v)?;
    let logs: Vec<f64> = energies.iter().map(|e| e.ln()).collect();
    let rate = super::fit_line(&logs).0.exp();
    let growth = !(rate < 1.0);
    let partial_sum: f64 = energies.iter().map(|e| e.powf(p / 4.0)).sum();
    let q = rate.powf(p / 4.0);
    let last = energies.last().unwrap().powf(p / 4.0);
    let series_bound = if growth {
        f64::INFINITY
    } else {
        partial_sum + last * q / (1.0 - q)
    };
    Ok(DecayProfile {
        energies,
        rate,
        growth,
        p,
        partial_sum,
        summable: series_bound.is_finite(),
        series_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::BUBBLE_ENERGY_4D;
    use crate::grid::build_cylinder;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const L: f64 = 1.0;

    /// `∫_{[a,b] x S³} e^{2st} = 2π² (e^{2sb} - e^{2sa}) / (2s)`.
    fn exp_band(s: f64, i: usize) -> f64 {
        let (a, b) = (i as f64 * L, (i + 1) as f64 * L);
        2.0 * PI * PI * ((2.0 * s * b).exp() - (2.0 * s * a).exp()) / (2.0 * s)
    }

    fn field(sign: f64) -> (GridManifold, BandDecomposition, ConformalField) {
        let (m, b) = build_cylinder(L, 3, 24, 8).unwrap();
        let v = ConformalField::from_fn(&m, |x| (sign * x[0]).exp()).unwrap();
        (m, b, v)
    }

    #[test]
    fn decaying_mode() {
        let (m, b, v) = field(-1.0);
        let t = three_circles_check(&m, &b, &v, L, 0.05 * BUBBLE_ENERGY_4D).unwrap();
        for i in 0..3 {
            // Midpoint-in-t quadrature of e^{-2t}: relative error ~ h²/6.
            assert!((t.band_energies[i] / exp_band(-1.0, i) - 1.0).abs() < 0.01);
        }
        assert!(t.hypothesis_met && t.curvature_energy < 1.0);
        assert!(t.clause1 && t.clause2 && t.trichotomy_holds && t.symmetric_trichotomy);
        assert!(t.band_energies[1] <= (-L).exp() * t.band_energies[0]);
    }

    #[test]
    fn growing_mode() {
        let (m, b, v) = field(1.0);
        let t = three_circles_check(&m, &b, &v, L, 0.05 * BUBBLE_ENERGY_4D).unwrap();
        for i in 0..3 {
            assert!((t.band_energies[i] / exp_band(1.0, i) - 1.0).abs() < 0.01);
        }
        // Hypothesis of clause (1) and its conclusion both hold.
        assert!(t.band_energies[0] <= (-L).exp() * t.band_energies[1]);
        assert!(t.band_energies[1] <= (-L).exp() * t.band_energies[2]);
        assert!(t.clause1 && t.clause2 && t.trichotomy_holds && t.hypothesis_met);
    }

    #[test]
    fn constant_is_negative_case() {
        let (m, b) = build_cylinder(L, 3, 24, 8).unwrap();
        let v = ConformalField::constant(&m, 1.0).unwrap();
        let t = three_circles_check(&m, &b, &v, L, 0.05 * BUBBLE_ENERGY_4D).unwrap();
        assert!(!t.trichotomy_holds && !t.symmetric_trichotomy && !t.hypothesis_met);
        // R = 6 / v², so ∫R² v⁴ dV_q = 36 Vol(Q).
        assert!((t.curvature_energy / (36.0 * 3.0 * 2.0 * PI * PI) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn perturbed_modes_keep_trichotomy() {
        let (m, b, v) = field(-1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let noisy: Vec<f64> = v.values().iter().map(|&x| x * (1.0 + 0.01 * rng.gen_range(-1.0..1.0))).collect();
            let w = ConformalField::new(&m, noisy).unwrap();
            let t = three_circles_check(&m, &b, &w, L, 0.05 * BUBBLE_ENERGY_4D).unwrap();
            assert!(t.trichotomy_holds && t.implications_hold());
            assert!(!t.hypothesis_met || t.trichotomy_holds);
        }
        let smooth = ConformalField::from_fn(&m, |x| (-x[0]).exp() * (1.0 + 0.01 * x[1].cos())).unwrap();
        let t = three_circles_check(&m, &b, &smooth, L, 0.05 * BUBBLE_ENERGY_4D).unwrap();
        assert!(t.hypothesis_met && t.trichotomy_holds);
    }

    #[test]
    fn decay_profile() {
        let (m, b) = build_cylinder(L, 5, 12, 6).unwrap();
        let v = ConformalField::from_fn(&m, |x| (-x[0]).exp()).unwrap();
        let d = singularity_decay_profile(&m, &b, &v, 1.5).unwrap();
        assert!((d.rate / (-2.0 * L).exp() - 1.0).abs() < 0.01, "{}", d.rate);
        assert!(d.summable && !d.growth && d.series_bound >= d.partial_sum);
        let w = ConformalField::from_fn(&m, |x| (-x[0]).exp() + 0.01 * x[0].exp()).unwrap();
        let g = singularity_decay_profile(&m, &b, &w, 1.5).unwrap();
        assert!(g.growth && !g.summable);
        let (m3, b3) = build_cylinder(L, 3, 12, 6).unwrap();
        let v3 = ConformalField::constant(&m3, 1.0).unwrap();
        assert!(singularity_decay_profile(&m3, &b3, &v3, 1.5).is_err());
    }
}
