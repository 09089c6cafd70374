//! Structured base manifolds `(M, g0)`: flat tori, the product cylinder
//! `[a, b] x S^3`, and a Euclidean ball chart.
//!
//! Every manifold stores per-vertex coordinates, volume weights, the analytic
//! base scalar curvature and a divergence-form Laplace-Beltrami stencil
//!
//! ```text
//! (Δ0 f)(a) = (1 / w_a) Σ_b c_ab (f_b - f_a),      c_ab = c_ba
//! ```
//!
//! so that `Σ_a g_a (Δ0 f)(a) w_a` is a symmetric, negative semidefinite form.

mod balls;
pub(crate) mod cylinder;
mod io;
mod laplacian;

pub use balls::{ball_offsets, ball_vertices};
pub use cylinder::{build_cylinder, build_cylinder_span, BandDecomposition};
pub use io::{read_mesh, write_mesh, MESH_MAGIC};
pub use laplacian::laplacian_apply;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentinel for "no vertex" in lattice lookups and neighbor slots.
pub(crate) const NONE: u32 = u32::MAX;

/// Default cap on the number of lattice points of a ball chart.
pub const DEFAULT_VERTEX_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Torus,
    CylinderS3,
    StereoBall,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Torus => "torus",
            Topology::CylinderS3 => "cylinder_s3",
            Topology::StereoBall => "stereo_ball",
        }
    }

    /// Flat topologies have a Euclidean lattice with uniform spacing.
    pub fn is_flat(self) -> bool {
        !matches!(self, Topology::CylinderS3)
    }
}

/// Everything needed to rebuild a mesh bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "topology", rename_all = "snake_case")]
pub enum MeshDescriptor {
    Torus {
        dim: usize,
        side: f64,
        divisions: usize,
    },
    CylinderS3 {
        t_start: f64,
        band_length: f64,
        num_bands: usize,
        t_divisions_per_band: usize,
        s3_resolution: usize,
    },
    StereoBall {
        dim: usize,
        cutoff: f64,
        divisions: usize,
        vertex_budget: usize,
    },
}

impl MeshDescriptor {
    pub fn build(&self) -> Result<GridManifold> {
        match *self {
            MeshDescriptor::Torus {
                dim,
                side,
                divisions,
            } => build_torus(dim, side, divisions),
            MeshDescriptor::CylinderS3 {
                t_start,
                band_length,
                num_bands,
                t_divisions_per_band,
                s3_resolution,
            } => build_cylinder_span(
                t_start,
                band_length,
                num_bands,
                t_divisions_per_band,
                s3_resolution,
            )
            .map(|(m, _)| m),
            MeshDescriptor::StereoBall {
                dim,
                cutoff,
                divisions,
                vertex_budget,
            } => build_stereo_ball_with_budget(dim, cutoff, divisions, vertex_budget),
        }
    }
}

/// Edge conductances: uniform per axis on flat lattices, per edge otherwise.
#[derive(Debug, Clone)]
pub(crate) enum Conductance {
    PerAxis(Vec<f64>),
    PerEdge(Vec<f64>),
}

/// CSR neighbor list. `tag = axis << 1 | dir` with `dir = 1` for the `+` side.
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    pub(crate) row: Vec<u32>,
    pub(crate) nbr: Vec<u32>,
    pub(crate) tag: Vec<u8>,
    pub(crate) cond: Conductance,
}

impl Stencil {
    #[inline]
    pub(crate) fn range(&self, v: usize) -> std::ops::Range<usize> {
        self.row[v] as usize..self.row[v + 1] as usize
    }

    #[inline]
    pub(crate) fn conductance(&self, e: usize) -> f64 {
        match &self.cond {
            Conductance::PerAxis(c) => c[(self.tag[e] >> 1) as usize],
            Conductance::PerEdge(c) => c[e],
        }
    }
}

/// One stencil edge as seen from its tail vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub to: usize,
    /// Symmetric conductance `c_ab`.
    pub conductance: f64,
    pub axis: usize,
    pub positive: bool,
}

/// A discretized base manifold. Immutable after construction.
#[derive(Debug, Clone)]
pub struct GridManifold {
    pub(crate) descriptor: MeshDescriptor,
    pub(crate) dim: usize,
    pub(crate) topology: Topology,
    /// Lattice extent per axis (the full cube for ball charts).
    pub(crate) shape: Vec<usize>,
    pub(crate) spacing: Vec<f64>,
    pub(crate) periodic: Vec<bool>,
    pub(crate) strides: Vec<usize>,
    pub(crate) coords: Vec<f64>,
    pub(crate) volume: Vec<f64>,
    pub(crate) r0: Vec<f64>,
    pub(crate) boundary: Vec<bool>,
    pub(crate) lattice_of: Vec<u32>,
    pub(crate) vertex_at: Vec<u32>,
    pub(crate) stencil: Stencil,
    /// Axes on which a boundary vertex may lack a neighbor.
    pub(crate) open_axes: Vec<usize>,
}

impl GridManifold {
    pub fn descriptor(&self) -> &MeshDescriptor {
        &self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.volume.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volume.is_empty()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn coords(&self, v: usize) -> &[f64] {
        &self.coords[v * self.dim..(v + 1) * self.dim]
    }

    pub fn vertex_volume(&self) -> &[f64] {
        &self.volume
    }

    pub fn r0_field(&self) -> &[f64] {
        &self.r0
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn total_volume(&self) -> f64 {
        self.volume.iter().sum()
    }

    /// Analytic volume of the continuum model this mesh discretizes.
    pub fn analytic_volume(&self) -> f64 {
        match self.descriptor {
            MeshDescriptor::Torus { dim, side, .. } => side.powi(dim as i32),
            MeshDescriptor::CylinderS3 {
                band_length,
                num_bands,
                ..
            } => band_length * num_bands as f64 * 2.0 * std::f64::consts::PI.powi(2),
            MeshDescriptor::StereoBall { dim, cutoff, .. } => unit_ball_volume(dim) * cutoff.powi(dim as i32),
        }
    }

    pub fn edges(&self, v: usize) -> impl Iterator<Item = Edge> + '_ {
        self.stencil.range(v).map(move |e| Edge {
            to: self.stencil.nbr[e] as usize,
            conductance: self.stencil.conductance(e),
            axis: (self.stencil.tag[e] >> 1) as usize,
            positive: self.stencil.tag[e] & 1 == 1,
        })
    }

    /// Lattice multi-index of a vertex.
    pub fn lattice_index(&self, v: usize) -> Vec<usize> {
        let mut lin = self.lattice_of[v] as usize;
        let mut idx = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            idx[a] = lin % self.shape[a];
            lin /= self.shape[a];
        }
        idx
    }

    /// Vertex at a (possibly out of range) lattice position; periodic axes wrap.
    pub fn vertex_at(&self, idx: &[isize]) -> Option<usize> {
        let mut lin = 0usize;
        for (a, &i) in idx.iter().enumerate() {
            let n = self.shape[a] as isize;
            let i = if self.periodic[a] {
                i.rem_euclid(n)
            } else if i < 0 || i >= n {
                return None;
            } else {
                i
            };
            lin += i as usize * self.strides[a];
        }
        match self.vertex_at[lin] {
            NONE => None,
            v => Some(v as usize),
        }
    }

    /// Neighbor one lattice step along `axis`.
    pub fn step(&self, v: usize, axis: usize, positive: bool) -> Option<usize> {
        let idx = self.lattice_index(v);
        let mut p: Vec<isize> = idx.iter().map(|&i| i as isize).collect();
        p[axis] += if positive { 1 } else { -1 };
        self.vertex_at(&p)
    }

    /// Base-metric distance between two vertices (periodic on the torus,
    /// product geodesic distance on the cylinder).
    pub fn base_distance(&self, a: usize, b: usize) -> f64 {
        self.base_distance_sq(a, b).sqrt()
    }

    pub fn base_distance_sq(&self, a: usize, b: usize) -> f64 {
        match self.topology {
            Topology::CylinderS3 => {
                let (ca, cb) = (self.coords(a), self.coords(b));
                let dt = ca[0] - cb[0];
                let ang = cylinder::s3_angle(&ca[1..], &cb[1..]);
                dt * dt + ang * ang
            }
            _ => {
                let (ia, ib) = (self.lattice_index(a), self.lattice_index(b));
                let mut s = 0.0;
                for ax in 0..self.dim {
                    let d = self.lattice_delta(ia[ax], ib[ax], ax) as f64 * self.spacing[ax];
                    s += d * d;
                }
                s
            }
        }
    }

    /// Signed lattice displacement `b - a` along an axis (minimum image if periodic).
    pub(crate) fn lattice_delta(&self, a: usize, b: usize, axis: usize) -> isize {
        let n = self.shape[axis] as isize;
        let mut d = b as isize - a as isize;
        if self.periodic[axis] {
            d = d.rem_euclid(n);
            if 2 * d > n {
                d -= n;
            }
        }
        d
    }

    /// Largest radius `r` such that `B_r(x)` stays inside the domain.
    /// `None` on closed manifolds.
    pub fn admissible_radius(&self, x: usize) -> Option<f64> {
        match self.descriptor {
            MeshDescriptor::Torus { .. } => None,
            MeshDescriptor::StereoBall { cutoff, .. } => {
                let r = self.coords(x).iter().map(|c| c * c).sum::<f64>().sqrt();
                Some((cutoff - r).max(0.0))
            }
            MeshDescriptor::CylinderS3 {
                t_start,
                band_length,
                num_bands,
                ..
            } => {
                let t = self.coords(x)[0];
                let t_end = t_start + band_length * num_bands as f64;
                Some((t - t_start).min(t_end - t))
            }
        }
    }

    /// Vertex nearest to a coordinate point on a flat lattice.
    pub fn nearest_vertex(&self, point: &[f64]) -> Option<usize> {
        if !self.topology.is_flat() || point.len() != self.dim {
            return None;
        }
        let idx: Vec<isize> = (0..self.dim)
            .map(|a| ((point[a] - self.origin(a)) / self.spacing[a]).round() as isize)
            .collect();
        self.vertex_at(&idx)
    }

    /// Multilinear interpolation of a vertex field at a coordinate point of a
    /// flat lattice (wrapping on the torus). `None` if a contributing lattice
    /// corner is missing.
    pub fn interpolate(&self, f: &[f64], point: &[f64]) -> Option<f64> {
        if !self.topology.is_flat() || point.len() != self.dim {
            return None;
        }
        let n = self.dim;
        let mut base = [0isize; 4];
        let mut frac = [0.0f64; 4];
        for a in 0..n {
            let s = (point[a] - self.origin(a)) / self.spacing[a];
            if !s.is_finite() {
                return None;
            }
            let i = s.floor();
            base[a] = i as isize;
            frac[a] = s - i;
        }
        let mut acc = 0.0;
        let mut idx = [0isize; 4];
        for corner in 0..(1usize << n) {
            let mut weight = 1.0;
            for a in 0..n {
                let up = corner >> a & 1 == 1;
                weight *= if up { frac[a] } else { 1.0 - frac[a] };
                idx[a] = base[a] + up as isize;
            }
            if weight == 0.0 {
                continue;
            }
            acc += weight * f[self.vertex_at(&idx[..n])?];
        }
        Some(acc)
    }

    /// Coordinate of lattice index 0 along an axis (flat lattices).
    pub(crate) fn origin(&self, axis: usize) -> f64 {
        match self.descriptor {
            MeshDescriptor::StereoBall { divisions, .. } => -((divisions / 2) as f64) * self.spacing[axis],
            _ => 0.0,
        }
    }

    /// Restriction of a flat lattice to every `stride`-th lattice point.
    /// Returns the coarse manifold and, for each coarse vertex, the fine vertex
    /// at the same position.
    pub fn coarsen(&self, stride: usize) -> Result<(GridManifold, Vec<usize>)> {
        if stride == 1 {
            return Ok((self.clone(), (0..self.len()).collect()));
        }
        let coarse = match self.descriptor {
            MeshDescriptor::Torus {
                dim,
                side,
                divisions,
            } if divisions % stride == 0 => build_torus(dim, side, divisions / stride)?,
            MeshDescriptor::StereoBall {
                dim,
                cutoff,
                divisions,
                vertex_budget,
            } if divisions % (2 * stride) == 0 => {
                build_stereo_ball_with_budget(dim, cutoff, divisions / stride, vertex_budget)?
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "cannot coarsen {} mesh by stride {stride}",
                    self.topology.name()
                )))
            }
        };
        let map = (0..coarse.len())
            .map(|cv| {
                let idx: Vec<isize> = coarse
                    .lattice_index(cv)
                    .iter()
                    .map(|&i| (i * stride) as isize)
                    .collect();
                self.vertex_at(&idx).expect("coarse lattice point lies on the fine lattice")
            })
            .collect();
        Ok((coarse, map))
    }
}

pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        4 => PI * PI / 2.0,
        _ => {
            let half = n as f64 / 2.0;
            PI.powf(half) / statrs::function::gamma::gamma(half + 1.0)
        }
    }
}

fn strides_for(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * shape[a + 1];
    }
    strides
}

fn check_dim(n: usize) -> Result<()> {
    if n == 3 || n == 4 {
        Ok(())
    } else {
        Err(Error::InvalidMesh(format!("dimension {n} unsupported (only 3 and 4)")))
    }
}

/// Assemble a flat lattice manifold from a vertex mask.
fn flat_lattice(
    descriptor: MeshDescriptor,
    topology: Topology,
    n: usize,
    per_axis: usize,
    h: f64,
    periodic: bool,
    keep: impl Fn(&[usize]) -> bool,
) -> GridManifold {
    let shape = vec![per_axis; n];
    let strides = strides_for(&shape);
    let total: usize = shape.iter().product();
    let center = (per_axis / 2) as isize;

    let mut vertex_at = vec![NONE; total];
    let mut lattice_of = Vec::new();
    let mut coords = Vec::new();
    let mut idx = vec![0usize; n];
    for lin in 0..total {
        let mut rem = lin;
        for a in (0..n).rev() {
            idx[a] = rem % per_axis;
            rem /= per_axis;
        }
        if keep(&idx) {
            vertex_at[lin] = lattice_of.len() as u32;
            lattice_of.push(lin as u32);
            for &i in &idx {
                // Symmetric about the chart center so the center is exactly 0.
                let c = if periodic {
                    i as f64 * h
                } else {
                    (i as isize - center) as f64 * h
                };
                coords.push(c);
            }
        }
    }
    let nv = lattice_of.len();
    let w = h.powi(n as i32);

    let mut row = Vec::with_capacity(nv + 1);
    let mut nbr = Vec::with_capacity(nv * 2 * n);
    let mut tag = Vec::with_capacity(nv * 2 * n);
    let mut boundary = vec![false; nv];
    row.push(0u32);
    for v in 0..nv {
        let mut rem = lattice_of[v] as usize;
        for a in (0..n).rev() {
            idx[a] = rem % per_axis;
            rem /= per_axis;
        }
        for a in 0..n {
            for (dir, delta) in [(0u8, -1isize), (1u8, 1isize)] {
                let mut i = idx[a] as isize + delta;
                if periodic {
                    i = i.rem_euclid(per_axis as isize);
                } else if i < 0 || i >= per_axis as isize {
                    boundary[v] = true;
                    continue;
                }
                let lin = lattice_of[v] as isize + (i - idx[a] as isize) * strides[a] as isize;
                match vertex_at[lin as usize] {
                    NONE => boundary[v] = true,
                    u => {
                        nbr.push(u);
                        tag.push(((a as u8) << 1) | dir);
                    }
                }
            }
        }
        row.push(nbr.len() as u32);
    }

    GridManifold {
        descriptor,
        dim: n,
        topology,
        shape,
        spacing: vec![h; n],
        periodic: vec![periodic; n],
        strides,
        coords,
        volume: vec![w; nv],
        r0: vec![0.0; nv],
        boundary,
        lattice_of,
        vertex_at,
        stencil: Stencil {
            row,
            nbr,
            tag,
            cond: Conductance::PerAxis(vec![h.powi(n as i32 - 2); n]),
        },
        open_axes: if periodic { Vec::new() } else { (0..n).collect() },
    }
}

/// Periodic grid on the flat torus `[0, side)^n`.
pub fn build_torus(n: usize, side: f64, divisions: usize) -> Result<GridManifold> {
    check_dim(n)?;
    if divisions < 4 {
        return Err(Error::InvalidMesh(format!("torus needs at least 4 divisions, got {divisions}")));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::InvalidMesh(format!("torus side must be positive, got {side}")));
    }
    let h = side / divisions as f64;
    let descriptor = MeshDescriptor::Torus {
        dim: n,
        side,
        divisions,
    };
    Ok(flat_lattice(descriptor, Topology::Torus, n, divisions, h, true, |_| true))
}

/// Euclidean ball chart `|x| <= cutoff` cut from the lattice on `[-cutoff, cutoff]^n`.
pub fn build_stereo_ball(n: usize, cutoff: f64, divisions: usize) -> Result<GridManifold> {
    build_stereo_ball_with_budget(n, cutoff, divisions, DEFAULT_VERTEX_BUDGET)
}

pub fn build_stereo_ball_with_budget(
    n: usize,
    cutoff: f64,
    divisions: usize,
    vertex_budget: usize,
) -> Result<GridManifold> {
    check_dim(n)?;
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidMesh(format!("cutoff radius must be positive, got {cutoff}")));
    }
    if divisions < 2 || divisions % 2 != 0 {
        return Err(Error::InvalidMesh(format!("ball divisions must be even and >= 2, got {divisions}")));
    }
    let per_axis = divisions + 1;
    let requested = per_axis.checked_pow(n as u32).unwrap_or(usize::MAX);
    if requested > vertex_budget {
        return Err(Error::VertexBudget {
            requested,
            budget: vertex_budget,
        });
    }
    let h = 2.0 * cutoff / divisions as f64;
    let half = (divisions / 2) as isize;
    let descriptor = MeshDescriptor::StereoBall {
        dim: n,
        cutoff,
        divisions,
        vertex_budget,
    };
    Ok(flat_lattice(
        descriptor,
        Topology::StereoBall,
        n,
        per_axis,
        h,
        false,
        |idx| idx.iter().map(|&i| (i as isize - half).pow(2)).sum::<isize>() <= half * half,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn torus_counts_and_volume() {
        let m = build_torus(3, 2.0 * PI, 16).unwrap();
        assert_eq!(m.len(), 4096);
        assert!((m.total_volume() - (2.0 * PI).powi(3)).abs() < 1e-9);
        assert!((m.total_volume() - 248.05).abs() < 0.01);

        let m = build_torus(4, 1.0, 8).unwrap();
        assert_eq!(m.len(), 4096);
        assert!(m.vertex_volume().iter().all(|&w| w == 0.125f64.powi(4)));
        assert!(m.r0_field().iter().all(|&r| r == 0.0));
        assert!(m.boundary_mask().iter().all(|&b| !b));
    }

    #[test]
    fn torus_rejects_bad_parameters() {
        assert!(matches!(build_torus(5, 1.0, 8), Err(Error::InvalidMesh(_))));
        assert!(matches!(build_torus(2, 1.0, 8), Err(Error::InvalidMesh(_))));
        assert!(matches!(build_torus(3, 1.0, 3), Err(Error::InvalidMesh(_))));
        assert!(matches!(build_torus(3, -1.0, 8), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn ball_grid_arithmetic() {
        let m = build_stereo_ball(4, 4.0, 32).unwrap();
        assert_eq!(m.spacing()[0], 0.25);
        let lattice = 33usize.pow(4);
        let masked_out = lattice - m.len();
        // ~8e5 lattice points fall outside the ball.
        assert!((7.5e5..9.0e5).contains(&(masked_out as f64)), "{masked_out}");
        let rel = m.total_volume() / m.analytic_volume() - 1.0;
        assert!(rel.abs() < 0.01, "{rel}");
        let c = m.nearest_vertex(&[0.0; 4]).unwrap();
        assert!(m.coords(c).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn ball_boundary_is_missing_neighbor() {
        let m = build_stereo_ball(3, 6.0, 48).unwrap();
        for v in 0..m.len() {
            let full = m.edges(v).count() == 6;
            assert_eq!(m.boundary_mask()[v], !full);
        }
    }

    #[test]
    fn ball_budget_and_parity() {
        assert!(matches!(
            build_stereo_ball(4, 1.0, 40),
            Err(Error::VertexBudget { .. })
        ));
        assert!(build_stereo_ball_with_budget(4, 1.0, 40, 3_000_000).is_ok());
        assert!(matches!(build_stereo_ball(3, 1.0, 7), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn stencil_is_symmetric() {
        for m in [
            build_torus(3, 1.0, 6).unwrap(),
            build_stereo_ball(3, 1.0, 10).unwrap(),
            build_cylinder(1.0, 3, 4, 6).unwrap().0,
        ] {
            for a in 0..m.len() {
                for e in m.edges(a) {
                    let back: Vec<_> = m.edges(e.to).filter(|b| b.to == a).collect();
                    assert_eq!(back.len(), 1, "edge {a}->{} has no unique reverse", e.to);
                    assert!((back[0].conductance - e.conductance).abs() <= 1e-14 * e.conductance);
                }
            }
        }
    }

    #[test]
    fn interpolation_is_exact_on_multilinear_fields() {
        let m = build_stereo_ball(3, 1.0, 8).unwrap();
        let f: Vec<f64> = (0..m.len())
            .map(|v| {
                let x = m.coords(v);
                1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[2]
            })
            .collect();
        let p = [0.1, -0.23, 0.31];
        let want = 1.0 + 0.2 + 0.23 + 0.5 * 0.1 * 0.31;
        assert!((m.interpolate(&f, &p).unwrap() - want).abs() < 1e-12);
        assert!(m.interpolate(&f, &[0.99, 0.0, 0.1]).is_none());
        let t = build_torus(3, 1.0, 8).unwrap();
        let g: Vec<f64> = (0..t.len()).map(|v| t.coords(v)[0]).collect();
        // Wraps across the periodic seam: between x = 0.875 and x = 0 (≡ 1).
        assert!((t.interpolate(&g, &[0.9375, 0.0, 0.0]).unwrap() - 0.4375).abs() < 1e-12);
        assert_eq!(t.interpolate(&g, &[1.25, 0.0, 0.0]), Some(0.25));
    }

    #[test]
    fn coarsen_maps_to_same_positions() {
        let m = build_stereo_ball(3, 2.0, 16).unwrap();
        let (c, map) = m.coarsen(2).unwrap();
        assert_eq!(c.spacing()[0], 2.0 * m.spacing()[0]);
        for (cv, &fv) in map.iter().enumerate() {
            for (a, b) in c.coords(cv).iter().zip(m.coords(fv)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(m.coarsen(3).is_err());
    }
}
