//! Conformal factors `u > 0` with `g = u^{4/(n-2)} g0`, and the quantities
//! derived from them: scalar curvature, volumes, `∫R² dV`, heat-trace
//! invariants, John-Nirenberg radius and discrete Sobolev norms.

mod cylindrical;
mod io;
mod jn;
pub mod profiles;
mod sobolev;
mod thresholds;

pub use cylindrical::{cylindrical_transform, transform_check, CylinderField, TransformCheck};
pub use io::{manifold_hash, read_field, write_diagnostics_csv, write_field, FIELD_MAGIC};
pub use jn::{jn_radius, mean_oscillation};
pub use sobolev::{regularity_ratio, sobolev_norm, sobolev_terms, SobolevTerms};
pub use thresholds::{ThresholdConfig, BUBBLE_ENERGY_4D};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{laplacian_apply, GridManifold};

/// Default floor below which a conformal factor is treated as degenerate.
pub const DEFAULT_FLOOR: f64 = 1e-8;

/// Exponents of the convention `g = u^{4/(n-2)} g0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    /// `dV_g = u^{volume} dV_0`.
    pub volume: f64,
    /// `R_g = u^{-curvature} (...)`.
    pub curvature: f64,
    /// Coefficient `4(n-1)/(n-2)` of the conformal Laplacian.
    pub yamabe: f64,
    /// Length element `ds_g = u^{length} ds_0`.
    pub length: f64,
}

impl Exponents {
    pub fn for_dim(n: usize) -> Self {
        let n = n as f64;
        Exponents {
            volume: 2.0 * n / (n - 2.0),
            curvature: (n + 2.0) / (n - 2.0),
            yamabe: 4.0 * (n - 1.0) / (n - 2.0),
            length: 2.0 / (n - 2.0),
        }
    }
}

/// `u^e` with integer fast paths for the exponents that occur in n = 3, 4.
#[inline]
pub fn upow(u: f64, e: f64) -> f64 {
    if e == e.trunc() && e.abs() <= 8.0 {
        u.powi(e as i32)
    } else {
        u.powf(e)
    }
}

/// A positive conformal factor on a given mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalField {
    values: Vec<f64>,
}

impl ConformalField {
    pub fn new(m: &GridManifold, values: Vec<f64>) -> Result<Self> {
        if values.len() != m.len() {
            return Err(Error::FieldLength {
                expected: m.len(),
                got: values.len(),
            });
        }
        if let Some((vertex, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveField { vertex, value });
        }
        Ok(ConformalField { values })
    }

    pub fn constant(m: &GridManifold, c: f64) -> Result<Self> {
        Self::new(m, vec![c; m.len()])
    }

    /// Field sampled from a function of the vertex coordinates.
    pub fn from_fn(m: &GridManifold, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new(m, (0..m.len()).map(|v| f(m.coords(v))).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `c * u`.
    pub fn scaled(&self, c: f64) -> ConformalField {
        ConformalField {
            values: self.values.iter().map(|u| c * u).collect(),
        }
    }

    pub(crate) fn check(&self, m: &GridManifold) -> Result<()> {
        if self.values.len() != m.len() {
            return Err(Error::FieldLength {
                expected: m.len(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Scalar curvature of `g` with the vertices where it was computed from
/// one-sided differences.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    pub values: Vec<f64>,
    pub unreliable: Vec<bool>,
}

/// `R(g) = u^{-(n+2)/(n-2)} (-(4(n-1)/(n-2)) Δ0 u + R0 u)`.
pub fn scalar_curvature(m: &GridManifold, u: &ConformalField) -> Result<Curvature> {
    scalar_curvature_with_floor(m, u, DEFAULT_FLOOR)
}

pub fn scalar_curvature_with_floor(m: &GridManifold, u: &ConformalField, floor: f64) -> Result<Curvature> {
    u.check(m)?;
    let min = u.min();
    if min < floor {
        return Err(Error::DegenerateField { min, floor });
    }
    let ex = Exponents::for_dim(m.dim());
    let lap = laplacian_apply(m, u.values());
    let r0 = m.r0_field();
    let values = u
        .values()
        .iter()
        .zip(&lap)
        .zip(r0)
        .map(|((&u, &l), &r0)| (-ex.yamabe * l + r0 * u) / upow(u, ex.curvature))
        .collect();
    Ok(Curvature {
        values,
        unreliable: m.boundary_mask().to_vec(),
    })
}

/// The conformal Laplacian `-(4(n-1)/(n-2)) Δ0 u + R0 u`.
pub fn yamabe_operator(m: &GridManifold, u: &ConformalField) -> Result<Vec<f64>> {
    u.check(m)?;
    let ex = Exponents::for_dim(m.dim());
    let lap = laplacian_apply(m, u.values());
    Ok(u.values()
        .iter()
        .zip(&lap)
        .zip(m.r0_field())
        .map(|((&u, &l), &r0)| -ex.yamabe * l + r0 * u)
        .collect())
}

/// Cached per-vertex geometry of `g = u^{4/(n-2)} g0`.
#[derive(Debug, Clone)]
pub struct ConformalMetric {
    /// `u^{2n/(n-2)} w_v`.
    pub vertex_volume: Vec<f64>,
    pub curvature: Curvature,
    u2: Vec<f64>,
}

impl ConformalMetric {
    pub fn new(m: &GridManifold, u: &ConformalField) -> Result<Self> {
        let curvature = scalar_curvature(m, u)?;
        let ex = Exponents::for_dim(m.dim());
        let vertex_volume = u
            .values()
            .iter()
            .zip(m.vertex_volume())
            .map(|(&u, &w)| upow(u, ex.volume) * w)
            .collect();
        Ok(ConformalMetric {
            vertex_volume,
            curvature,
            u2: u.values().iter().map(|u| u * u).collect(),
        })
    }

    /// Dirichlet-energy weight `u^2` on edge `ab` (arithmetic mean of the endpoint values).
    #[inline]
    pub fn edge_weight(&self, a: usize, b: usize) -> f64 {
        0.5 * (self.u2[a] + self.u2[b])
    }
}

/// Volume and `∫R² dV` of `g` over a set of vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMeasures {
    pub volume: f64,
    pub r2_integral: f64,
}

pub fn region_measures(m: &GridManifold, u: &ConformalField, region: &[usize]) -> Result<RegionMeasures> {
    if region.is_empty() {
        return Err(Error::EmptyRegion("region_measures needs at least one vertex".into()));
    }
    let g = ConformalMetric::new(m, u)?;
    Ok(measures_of(&g, region))
}

pub(crate) fn measures_of(g: &ConformalMetric, region: &[usize]) -> RegionMeasures {
    let mut out = RegionMeasures {
        volume: 0.0,
        r2_integral: 0.0,
    };
    for &v in region {
        let dv = g.vertex_volume[v];
        out.volume += dv;
        out.r2_integral += g.curvature.values[v].powi(2) * dv;
    }
    out
}

/// Heat-trace invariants `a0 = Vol`, `a1 = (1/6) ∫R dV`, and `∫R² dV`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatInvariants {
    pub a0: f64,
    pub a1: f64,
    pub r2_integral: f64,
}

impl HeatInvariants {
    /// The scale-invariant ratio `a1 / sqrt(a0)`.
    pub fn a1_over_sqrt_a0(&self) -> f64 {
        self.a1 / self.a0.sqrt()
    }
}

pub fn heat_invariants(m: &GridManifold, u: &ConformalField) -> Result<HeatInvariants> {
    let g = ConformalMetric::new(m, u)?;
    Ok(invariants_of(&g))
}

pub(crate) fn invariants_of(g: &ConformalMetric) -> HeatInvariants {
    let mut a0 = 0.0;
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    for (dv, r) in g.vertex_volume.iter().zip(&g.curvature.values) {
        a0 += dv;
        r1 += r * dv;
        r2 += r * r * dv;
    }
    HeatInvariants {
        a0,
        a1: r1 / 6.0,
        r2_integral: r2,
    }
}

/// `c * u` with unit `g`-volume, and the normalizer `c = Vol^{-(n-2)/(2n)}`.
pub fn normalize_volume(m: &GridManifold, u: &ConformalField) -> Result<(ConformalField, f64)> {
    u.check(m)?;
    let ex = Exponents::for_dim(m.dim());
    let vol: f64 = u
        .values()
        .iter()
        .zip(m.vertex_volume())
        .map(|(&u, &w)| upow(u, ex.volume) * w)
        .sum();
    let c = vol.powf(-1.0 / ex.volume);
    Ok((u.scaled(c), c))
}
