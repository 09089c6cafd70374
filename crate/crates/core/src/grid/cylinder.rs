//! Product cylinder `[t0, t0 + m L] x S^3` with metric `dt^2 + g_{S^3}`.
//!
//! Finite volumes on a cell-centered grid in `(t, psi, theta, phi)`. The psi
//! cells touching the poles are merged into one vertex per pole and t-layer.
//! Face conductances integrate `sqrt(g) g^{ii}` over each face (exactly,
//! except for the phi faces, which use the midpoint rule in theta).

use std::f64::consts::PI;

use super::{strides_for, Conductance, GridManifold, MeshDescriptor, Stencil, Topology, NONE};
use crate::error::{Error, Result};

/// The bands `Q_i = [t0 + (i-1) L, t0 + i L] x S^3` of a cylinder mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct BandDecomposition {
    pub band_length: f64,
    pub t_start: f64,
    /// Number of t-layers per band.
    pub layers_per_band: usize,
    /// Vertex ids of each band, in ascending order.
    pub bands: Vec<Vec<usize>>,
}

impl BandDecomposition {
    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// t-range `[lo, hi]` of band `i` (0-based).
    pub fn t_range(&self, i: usize) -> (f64, f64) {
        let lo = self.t_start + i as f64 * self.band_length;
        (lo, lo + self.band_length)
    }

    /// Split every band into `parts` sub-bands of length `L / parts`.
    pub fn refine(&self, mesh: &GridManifold, parts: usize) -> Result<BandDecomposition> {
        if parts == 0 || self.layers_per_band % parts != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} t-layers per band cannot be split into {parts} sub-bands",
                self.layers_per_band
            )));
        }
        Ok(decompose(
            mesh,
            self.t_start,
            self.band_length / parts as f64,
            self.layers_per_band / parts,
        ))
    }
}

fn decompose(mesh: &GridManifold, t_start: f64, band_length: f64, layers_per_band: usize) -> BandDecomposition {
    let nt = mesh.shape[0];
    let mut bands = vec![Vec::new(); nt / layers_per_band];
    for v in 0..mesh.len() {
        let layer = mesh.lattice_of[v] as usize / mesh.strides[0];
        bands[layer / layers_per_band].push(v);
    }
    BandDecomposition {
        band_length,
        t_start,
        layers_per_band,
        bands,
    }
}

/// Cylinder over `[0, num_bands * L]`.
pub fn build_cylinder(
    band_length: f64,
    num_bands: usize,
    t_divisions_per_band: usize,
    s3_resolution: usize,
) -> Result<(GridManifold, BandDecomposition)> {
    build_cylinder_span(0.0, band_length, num_bands, t_divisions_per_band, s3_resolution)
}

/// Cylinder over `[t_start, t_start + num_bands * L]`.
pub fn build_cylinder_span(
    t_start: f64,
    band_length: f64,
    num_bands: usize,
    t_divisions_per_band: usize,
    s3_resolution: usize,
) -> Result<(GridManifold, BandDecomposition)> {
    if !(band_length > 0.0 && band_length.is_finite()) || !t_start.is_finite() {
        return Err(Error::InvalidMesh(format!("band length must be positive, got {band_length}")));
    }
    if num_bands < 3 {
        return Err(Error::InvalidMesh(format!("need at least 3 bands, got {num_bands}")));
    }
    if t_divisions_per_band < 1 {
        return Err(Error::InvalidMesh("need at least one t-division per band".into()));
    }
    if s3_resolution < 4 {
        return Err(Error::InvalidMesh(format!(
            "s3_resolution {s3_resolution} leaves no regular cells between the merged polar caps (minimum 4)"
        )));
    }

    let nt = num_bands * t_divisions_per_band;
    let (npsi, nth, nph) = (s3_resolution, s3_resolution, 2 * s3_resolution);
    let ht = band_length / t_divisions_per_band as f64;
    let (dpsi, dth, dph) = (PI / npsi as f64, PI / nth as f64, 2.0 * PI / nph as f64);

    let shape = vec![nt, npsi, nth, nph];
    let strides = strides_for(&shape);
    let per_layer = 2 + (npsi - 2) * nth * nph;

    // Exact per-cell integrals of the S^3 density.
    let sin2_int = |a: f64, b: f64| (b - a) / 2.0 - ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0;
    let th_area: Vec<f64> = (0..nth)
        .map(|j| (j as f64 * dth).cos() - ((j + 1) as f64 * dth).cos())
        .collect();
    // Midpoint rule for the phi-face integral of 1/sin(theta); the exact
    // integral diverges in the cells touching theta = 0 and pi.
    let th_inv: Vec<f64> = (0..nth)
        .map(|j| dth / ((j as f64 + 0.5) * dth).sin())
        .collect();
    let cap = 4.0 * PI * sin2_int(0.0, dpsi);

    // Layer-local S^3 vertex ids: 0 north pole, then regular cells, last south pole.
    let s3_id = |i: usize, j: usize, k: usize| -> usize {
        if i == 0 {
            0
        } else if i == npsi - 1 {
            per_layer - 1
        } else {
            1 + ((i - 1) * nth + j) * nph + k
        }
    };

    let mut s3_vol = vec![0.0; per_layer];
    let mut s3_coord = vec![[0.0; 3]; per_layer];
    s3_vol[0] = cap;
    s3_vol[per_layer - 1] = cap;
    s3_coord[per_layer - 1] = [PI, 0.0, 0.0];
    for i in 1..npsi - 1 {
        let sp = sin2_int(i as f64 * dpsi, (i + 1) as f64 * dpsi);
        for j in 0..nth {
            for k in 0..nph {
                let id = s3_id(i, j, k);
                s3_vol[id] = sp * th_area[j] * dph;
                s3_coord[id] = [(i as f64 + 0.5) * dpsi, (j as f64 + 0.5) * dth, k as f64 * dph];
            }
        }
    }

    // S^3 edges (per unit t-length): (a, b, conductance, axis).
    let mut s3_edges: Vec<(usize, usize, f64, u8)> = Vec::new();
    // Polar vertex to first ring: node distance chosen so the flux is exact
    // for profiles quadratic in psi near the pole.
    let polar_dist = 1.125 * dpsi;
    for j in 0..nth {
        for k in 0..nph {
            let c = dpsi.sin().powi(2) * th_area[j] * dph / polar_dist;
            s3_edges.push((s3_id(0, j, k), s3_id(1, j, k), c, 1));
            s3_edges.push((s3_id(npsi - 2, j, k), s3_id(npsi - 1, j, k), c, 1));
        }
    }
    for i in 1..npsi - 1 {
        for j in 0..nth {
            for k in 0..nph {
                let a = s3_id(i, j, k);
                if i + 1 < npsi - 1 {
                    let psi_f = (i + 1) as f64 * dpsi;
                    let c = psi_f.sin().powi(2) * th_area[j] * dph / dpsi;
                    s3_edges.push((a, s3_id(i + 1, j, k), c, 1));
                }
                if j + 1 < nth {
                    let c = ((j + 1) as f64 * dth).sin() * dpsi * dph / dth;
                    s3_edges.push((a, s3_id(i, j + 1, k), c, 2));
                }
                let c = dpsi * th_inv[j] / dph;
                s3_edges.push((a, s3_id(i, j, (k + 1) % nph), c, 3));
            }
        }
    }

    // Per-vertex adjacency of one layer, then replicated along t.
    let mut layer_adj: Vec<Vec<(usize, f64, u8)>> = vec![Vec::new(); per_layer];
    for &(a, b, c, axis) in &s3_edges {
        layer_adj[a].push((b, c, axis << 1 | 1));
        layer_adj[b].push((a, c, axis << 1));
    }
    for adj in &mut layer_adj {
        adj.sort_by_key(|&(b, _, tag)| (tag, b));
    }

    let nv = nt * per_layer;
    let mut coords = Vec::with_capacity(nv * 4);
    let mut volume = Vec::with_capacity(nv);
    let mut boundary = Vec::with_capacity(nv);
    let mut lattice_of = Vec::with_capacity(nv);
    let mut vertex_at = vec![NONE; shape.iter().product()];
    let mut row = Vec::with_capacity(nv + 1);
    let mut nbr = Vec::new();
    let mut tag = Vec::new();
    let mut cond = Vec::new();
    row.push(0u32);

    for l in 0..nt {
        let t = t_start + (l as f64 + 0.5) * ht;
        for s in 0..per_layer {
            let v = l * per_layer + s;
            coords.push(t);
            coords.extend_from_slice(&s3_coord[s]);
            volume.push(ht * s3_vol[s]);
            boundary.push(l == 0 || l == nt - 1);
            if l > 0 {
                nbr.push((v - per_layer) as u32);
                tag.push(0);
                cond.push(s3_vol[s] / ht);
            }
            if l + 1 < nt {
                nbr.push((v + per_layer) as u32);
                tag.push(1);
                cond.push(s3_vol[s] / ht);
            }
            for &(b, c, tg) in &layer_adj[s] {
                nbr.push((l * per_layer + b) as u32);
                tag.push(tg);
                cond.push(c * ht);
            }
            row.push(nbr.len() as u32);
        }
        // Lattice bookkeeping: polar vertices own every (psi = pole) lattice slot.
        for i in 0..npsi {
            for j in 0..nth {
                for k in 0..nph {
                    let lin = l * strides[0] + i * strides[1] + j * strides[2] + k;
                    vertex_at[lin] = (l * per_layer + s3_id(i, j, k)) as u32;
                }
            }
        }
        for s in 0..per_layer {
            let lin = if s == 0 {
                l * strides[0]
            } else if s == per_layer - 1 {
                l * strides[0] + (npsi - 1) * strides[1]
            } else {
                let r = s - 1;
                let (i, j, k) = (1 + r / (nth * nph), (r / nph) % nth, r % nph);
                l * strides[0] + i * strides[1] + j * strides[2] + k
            };
            lattice_of.push(lin as u32);
        }
    }

    let descriptor = MeshDescriptor::CylinderS3 {
        t_start,
        band_length,
        num_bands,
        t_divisions_per_band,
        s3_resolution,
    };
    let mesh = GridManifold {
        descriptor,
        dim: 4,
        topology: Topology::CylinderS3,
        shape,
        spacing: vec![ht, dpsi, dth, dph],
        periodic: vec![false, false, false, true],
        strides,
        coords,
        volume,
        r0: vec![6.0; nv],
        boundary,
        lattice_of,
        vertex_at,
        stencil: Stencil {
            row,
            nbr,
            tag,
            cond: Conductance::PerEdge(cond),
        },
        open_axes: vec![0],
    };
    let bands = decompose(&mesh, t_start, band_length, t_divisions_per_band);
    Ok((mesh, bands))
}

/// Embedding of hyperspherical angles `(psi, theta, phi)` into the unit sphere of R^4.
pub(crate) fn s3_embed(a: &[f64]) -> [f64; 4] {
    let (sp, cp) = a[0].sin_cos();
    let (st, ct) = a[1].sin_cos();
    let (sf, cf) = a[2].sin_cos();
    [cp, sp * ct, sp * st * cf, sp * st * sf]
}

/// Great-circle distance on the unit S^3.
pub(crate) fn s3_angle(a: &[f64], b: &[f64]) -> f64 {
    let (x, y) = (s3_embed(a), s3_embed(b));
    let chord = x.iter().zip(&y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    2.0 * (chord / 2.0).min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_is_product_measure() {
        for res in [4, 6, 8, 12] {
            let (m, _) = build_cylinder(1.0, 3, 4, res).unwrap();
            let target = 3.0 * 2.0 * PI * PI;
            assert!((m.total_volume() - 59.218).abs() < 0.01 * 59.218);
            assert!((m.total_volume() - target).abs() < 1e-9 * target);
        }
    }

    #[test]
    fn band_indexing() {
        let (m, b) = build_cylinder(2.0, 3, 4, 8).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.t_range(1), (2.0, 4.0));
        for v in &b.bands[1] {
            let t = m.coords(*v)[0];
            assert!((2.0..=4.0).contains(&t));
        }
        let total: usize = b.bands.iter().map(Vec::len).sum();
        assert_eq!(total, m.len());
        let fine = b.refine(&m, 2).unwrap();
        assert_eq!(fine.len(), 6);
        assert_eq!(fine.t_range(3), (3.0, 4.0));
        assert!(b.refine(&m, 3).is_err());
    }

    #[test]
    fn rejects_degenerate() {
        assert!(build_cylinder(1.0, 3, 4, 3).is_err());
        assert!(build_cylinder(1.0, 2, 4, 8).is_err());
        assert!(build_cylinder(0.0, 3, 4, 8).is_err());
    }

    #[test]
    fn r0_and_boundary() {
        let (m, _) = build_cylinder(1.0, 3, 2, 4).unwrap();
        assert!(m.r0_field().iter().all(|&r| r == 6.0));
        let nb = m.boundary_mask().iter().filter(|&&b| b).count();
        assert_eq!(nb, 2 * m.len() / 6);
    }

    #[test]
    fn s3_angles() {
        assert!((s3_angle(&[0.0, 0.0, 0.0], &[PI, 0.0, 0.0]) - PI).abs() < 1e-12);
        assert!((s3_angle(&[PI / 2.0, 0.0, 0.0], &[PI / 2.0, PI / 2.0, 0.0]) - PI / 2.0).abs() < 1e-12);
        assert_eq!(s3_angle(&[0.3, 1.0, 2.0], &[0.3, 1.0, 2.0]), 0.0);
    }
}
