//! Cylindrical coordinates around a point: `v(t, θ) = u(x0 + e^{-t} θ) e^{-t}`,
//! which turns the punctured ball with metric `u² |dx|²` into the cylinder
//! with metric `v² (dt² + g_{S³})`.

use super::{region_measures, ConformalField, ConformalMetric};
use crate::error::{Error, Result};
use crate::grid::{build_cylinder_span, BandDecomposition, GridManifold, MeshDescriptor};

use super::super::grid::cylinder::s3_embed;

/// A conformal factor on a cylinder mesh produced by [`cylindrical_transform`].
#[derive(Debug, Clone)]
pub struct CylinderField {
    pub mesh: GridManifold,
    pub bands: BandDecomposition,
    pub field: ConformalField,
    /// Chart coordinates of the puncture.
    pub center: Vec<f64>,
}

/// Resample `u` (on a 4-dimensional flat chart) onto the cylinder described
/// by `target` (a `CylinderS3` descriptor) by multilinear interpolation.
pub fn cylindrical_transform(
    m: &GridManifold,
    u: &ConformalField,
    x0: usize,
    target: &MeshDescriptor,
) -> Result<CylinderField> {
    u.check(m)?;
    if m.dim() != 4 || !m.topology().is_flat() {
        return Err(Error::Unsupported {
            op: "cylindrical_transform",
            topology: m.topology().name(),
        });
    }
    let &MeshDescriptor::CylinderS3 {
        t_start,
        band_length,
        num_bands,
        t_divisions_per_band,
        s3_resolution,
    } = target
    else {
        return Err(Error::InvalidArgument("cylindrical_transform needs a cylinder_s3 target".into()));
    };
    if m.boundary_mask()[x0] {
        return Err(Error::OutsideChart(format!("puncture vertex {x0} lies on the chart boundary")));
    }
    let outer = (-t_start).exp();
    if let Some(a) = m.admissible_radius(x0) {
        if outer > a {
            return Err(Error::OutsideChart(format!(
                "annulus radius e^-{t_start} = {outer} exceeds the chart margin {a}"
            )));
        }
    }
    let (mesh, bands) = build_cylinder_span(t_start, band_length, num_bands, t_divisions_per_band, s3_resolution)?;
    let center = m.coords(x0).to_vec();
    let mut vals = Vec::with_capacity(mesh.len());
    let mut p = [0.0; 4];
    for v in 0..mesh.len() {
        let c = mesh.coords(v);
        let r = (-c[0]).exp();
        let w = s3_embed(&c[1..]);
        for a in 0..4 {
            p[a] = center[a] + r * w[a];
        }
        let uv = m
            .interpolate(u.values(), &p)
            .ok_or_else(|| Error::OutsideChart(format!("sample point {p:?} not covered by the chart")))?;
        vals.push(uv * r);
    }
    let field = ConformalField::new(&mesh, vals)?;
    Ok(CylinderField {
        mesh,
        bands,
        field,
        center,
    })
}

/// Volume and curvature energy of the cylinder image against the
/// corresponding annulus `e^{-t_end} < |x - x0| <= e^{-t_start}` of the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformCheck {
    pub band_volume: f64,
    pub annulus_volume: f64,
    pub band_r2: f64,
    pub annulus_r2: f64,
}

pub fn transform_check(m: &GridManifold, u: &ConformalField, cf: &CylinderField) -> Result<TransformCheck> {
    let all: Vec<usize> = (0..cf.mesh.len()).collect();
    let band = measures_all(&cf.mesh, &cf.field, &all)?;
    let (lo, hi) = match *cf.mesh.descriptor() {
        MeshDescriptor::CylinderS3 {
            t_start,
            band_length,
            num_bands,
            ..
        } => ((-(t_start + band_length * num_bands as f64)).exp(), (-t_start).exp()),
        _ => unreachable!("cylinder field always lives on a cylinder mesh"),
    };
    let annulus: Vec<usize> = (0..m.len())
        .filter(|&v| {
            let r = m
                .coords(v)
                .iter()
                .zip(&cf.center)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            r > lo && r <= hi
        })
        .collect();
    let ann = region_measures(m, u, &annulus)?;
    Ok(TransformCheck {
        band_volume: band.volume,
        annulus_volume: ann.volume,
        band_r2: band.r2_integral,
        annulus_r2: ann.r2_integral,
    })
}

fn measures_all(m: &GridManifold, u: &ConformalField, region: &[usize]) -> Result<super::RegionMeasures> {
    let g = ConformalMetric::new(m, u)?;
    Ok(super::measures_of(&g, region))
}
