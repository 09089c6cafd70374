//! Volume and diameter of annular necks around a bubble.

use serde::{Deserialize, Serialize};

use crate::conformal::{ConformalField, ConformalMetric};
use crate::error::{Error, Result};
use crate::grid::{ball_vertices, GridManifold};
use crate::metric::{region_diameter, PathStencil};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeckStats {
    pub volume: f64,
    /// Diameter for paths confined to the annulus, from farthest-point sources.
    pub diameter: f64,
    pub vertices: usize,
}

impl NeckStats {
    /// `diam^n / Vol`, the scale-free shape ratio of the neck.
    pub fn shape_ratio(&self, n: usize) -> f64 {
        self.diameter.powi(n as i32) / self.volume
    }
}

/// Annulus `r_inner < d0(x, ·) <= r_outer` of base distance.
pub fn annulus(m: &GridManifold, x: usize, r_inner: f64, r_outer: f64) -> Vec<usize> {
    let inner = r_inner * r_inner * (1.0 + 1e-12);
    ball_vertices(m, x, r_outer)
        .into_iter()
        .filter(|&v| m.base_distance_sq(x, v) > inner)
        .collect()
}

pub fn neck_stats(
    m: &GridManifold,
    u: &ConformalField,
    x: usize,
    r_inner: f64,
    r_outer: f64,
    landmarks: usize,
    stencil: PathStencil,
) -> Result<NeckStats> {
    if !(r_inner >= 0.0 && r_inner < r_outer) {
        return Err(Error::InvalidArgument(format!("need 0 <= r_inner < r_outer, got {r_inner}, {r_outer}")));
    }
    let region = annulus(m, x, r_inner, r_outer);
    if region.is_empty() {
        return Err(Error::EmptyRegion(format!("no vertices with {r_inner} < d <= {r_outer}")));
    }
    let g = ConformalMetric::new(m, u)?;
    let volume = region.iter().map(|&v| g.vertex_volume[v]).sum();
    let diameter = region_diameter(m, u, &region, landmarks.max(1), stencil)?;
    Ok(NeckStats {
        volume,
        diameter,
        vertices: region.len(),
    })
}

/// Smallest `C` with `diam^n <= C · Vol` over a sweep.
pub fn fitted_shape_constant(stats: &[NeckStats], n: usize) -> f64 {
    stats.iter().map(|s| s.shape_ratio(n)).fold(0.0, f64::max)
}
