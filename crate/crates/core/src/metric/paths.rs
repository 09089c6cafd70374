//! Shortest paths for the conformal length `∫_γ u^{2/(n-2)} ds0`, with each
//! edge weighted by `ℓ0(e) (φ(a) + φ(b)) / 2`, `φ = u^{2/(n-2)}`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{upow, ConformalField, Exponents};
use crate::error::{Error, Result};
use crate::grid::{GridManifold, Topology};

/// Neighbor set of the path graph on flat lattices. The cylinder always uses
/// its Laplacian stencil with geodesic edge lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStencil {
    /// `±e_i`.
    Axis,
    /// `±e_i` and `±e_i ± e_j`.
    #[default]
    FaceDiagonal,
    /// Every offset in `{-1, 0, 1}^n`.
    Full,
}

/// Distances from each source to every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceRows {
    pub sources: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl DistanceRows {
    /// `d(sources[i], sources[j])`, symmetrized by the minimum of both directions.
    pub fn source_matrix(&self) -> Vec<f64> {
        let k = self.sources.len();
        let mut d = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    let a = self.rows[i][self.sources[j]];
                    let b = self.rows[j][self.sources[i]];
                    d[i * k + j] = a.min(b);
                }
            }
        }
        d
    }
}

pub(crate) struct PathGraph<'a> {
    m: &'a GridManifold,
    phi: Vec<f64>,
    offsets: Vec<([isize; 4], f64)>,
    /// Per stencil edge base length (cylinder only).
    edge_len: Vec<f64>,
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> PathGraph<'a> {
    pub(crate) fn new(m: &'a GridManifold, u: &ConformalField, stencil: PathStencil) -> Result<Self> {
        if u.len() != m.len() {
            return Err(Error::FieldLength {
                expected: m.len(),
                got: u.len(),
            });
        }
        let e = Exponents::for_dim(m.dim()).length;
        let phi = u.values().iter().map(|&x| upow(x, e)).collect();
        let mut offsets = Vec::new();
        let mut edge_len = Vec::new();
        if m.topology() == Topology::CylinderS3 {
            edge_len = (0..m.len())
                .flat_map(|a| m.edges(a).map(move |e| (a, e.to)))
                .map(|(a, b)| m.base_distance(a, b))
                .collect();
        } else {
            let n = m.dim();
            let h = m.spacing()[0];
            let total = 3usize.pow(n as u32);
            for code in 0..total {
                let mut off = [0isize; 4];
                let mut c = code;
                let mut nz = 0;
                for o in off.iter_mut().take(n) {
                    *o = (c % 3) as isize - 1;
                    c /= 3;
                    nz += (*o != 0) as usize;
                }
                let keep = match stencil {
                    PathStencil::Axis => nz == 1,
                    PathStencil::FaceDiagonal => nz == 1 || nz == 2,
                    PathStencil::Full => nz >= 1,
                };
                if keep {
                    offsets.push((off, h * (nz as f64).sqrt()));
                }
            }
        }
        Ok(PathGraph {
            m,
            phi,
            offsets,
            edge_len,
        })
    }

    #[inline]
    fn for_each_neighbor(&self, v: usize, mut f: impl FnMut(usize, f64)) {
        let m = self.m;
        if m.topology() == Topology::CylinderS3 {
            let r = m.stencil.range(v);
            for e in r {
                let b = m.stencil.nbr[e] as usize;
                f(b, self.edge_len[e] * 0.5 * (self.phi[v] + self.phi[b]));
            }
            return;
        }
        let n = m.dim();
        let mut lin = m.lattice_of[v] as usize;
        let mut idx = [0isize; 4];
        for a in (0..n).rev() {
            idx[a] = (lin % m.shape[a]) as isize;
            lin /= m.shape[a];
        }
        'off: for (off, len) in &self.offsets {
            let mut target = 0usize;
            for a in 0..n {
                let mut i = idx[a] + off[a];
                let s = m.shape[a] as isize;
                if m.periodic[a] {
                    if i < 0 {
                        i += s;
                    } else if i >= s {
                        i -= s;
                    }
                } else if i < 0 || i >= s {
                    continue 'off;
                }
                target += i as usize * m.strides[a];
            }
            let b = m.vertex_at[target];
            if b != crate::grid::NONE {
                let b = b as usize;
                f(b, len * 0.5 * (self.phi[v] + self.phi[b]));
            }
        }
    }

    /// Single-source shortest paths, optionally confined to `mask`.
    pub(crate) fn dijkstra(&self, src: usize, mask: Option<&[bool]>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.m.len()];
        if mask.map_or(false, |k| !k[src]) {
            return dist;
        }
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Item(0.0, src));
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            self.for_each_neighbor(v, |b, w| {
                if mask.map_or(true, |k| k[b]) {
                    let nd = d + w;
                    if nd < dist[b] {
                        dist[b] = nd;
                        heap.push(Item(nd, b));
                    }
                }
            });
        }
        dist
    }
}

/// `d_u` from every source to every vertex (unreachable vertices get `inf`).
pub fn conformal_distances(
    m: &GridManifold,
    u: &ConformalField,
    sources: &[usize],
    stencil: PathStencil,
) -> Result<DistanceRows> {
    if sources.is_empty() {
        return Err(Error::InvalidArgument("conformal_distances needs at least one source".into()));
    }
    if let Some(&s) = sources.iter().find(|&&s| s >= m.len()) {
        return Err(Error::InvalidArgument(format!("source {s} is not a vertex")));
    }
    let g = PathGraph::new(m, u, stencil)?;
    let rows = sources.par_iter().map(|&s| g.dijkstra(s, None)).collect();
    Ok(DistanceRows {
        sources: sources.to_vec(),
        rows,
    })
}

/// Shortest-path distance using only vertices of `region`; `connected` is
/// false (and `distance` infinite) when `x` and `y` are not joined inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfinedDistance {
    pub distance: f64,
    pub connected: bool,
}

pub fn confined_distance(
    m: &GridManifold,
    u: &ConformalField,
    x: usize,
    y: usize,
    region: &[usize],
    stencil: PathStencil,
) -> Result<ConfinedDistance> {
    let mask = region_mask(m, region);
    if !mask[x] || !mask[y] {
        return Err(Error::InvalidArgument("both endpoints must lie in the region".into()));
    }
    let g = PathGraph::new(m, u, stencil)?;
    let d = g.dijkstra(x, Some(&mask))[y];
    Ok(ConfinedDistance {
        distance: d,
        connected: d.is_finite(),
    })
}

pub(crate) fn region_mask(m: &GridManifold, region: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; m.len()];
    for &v in region {
        mask[v] = true;
    }
    mask
}

/// Diameter of `region` for paths confined to it, estimated from up to
/// `sample_size` farthest-point sources (exact when `sample_size >= |region|`).
/// Infinite if the region is disconnected.
pub fn region_diameter(
    m: &GridManifold,
    u: &ConformalField,
    region: &[usize],
    sample_size: usize,
    stencil: PathStencil,
) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::EmptyRegion("region_diameter of an empty region".into()));
    }
    let mut region = region.to_vec();
    region.sort_unstable();
    region.dedup();
    let mask = region_mask(m, &region);
    let g = PathGraph::new(m, u, stencil)?;
    if sample_size >= region.len() {
        let best = region
            .par_iter()
            .map(|&s| {
                let row = g.dijkstra(s, Some(&mask));
                region.iter().map(|&v| row[v]).fold(0.0, f64::max)
            })
            .collect::<Vec<_>>();
        return Ok(best.into_iter().fold(0.0, f64::max));
    }
    let mut nearest = vec![f64::INFINITY; region.len()];
    let mut src = region[0];
    let mut best = 0.0f64;
    for _ in 0..sample_size.max(1) {
        let row = g.dijkstra(src, Some(&mask));
        let mut next = (f64::NEG_INFINITY, src);
        for (i, &v) in region.iter().enumerate() {
            best = best.max(row[v]);
            nearest[i] = nearest[i].min(row[v]);
            if nearest[i] > next.0 {
                next = (nearest[i], v);
            }
        }
        if !best.is_finite() || next.0 <= 0.0 {
            break;
        }
        src = next.1;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::profiles::bubble_factor;
    use crate::grid::{build_cylinder, build_stereo_ball, build_torus};
    use proptest::prelude::*;

    #[test]
    fn constant_factor_scales_graph_distance() {
        let m = build_torus(3, 1.0, 8).unwrap();
        let one = ConformalField::constant(&m, 1.0).unwrap();
        let c = ConformalField::constant(&m, 2.5).unwrap();
        for st in [PathStencil::Axis, PathStencil::FaceDiagonal, PathStencil::Full] {
            let a = conformal_distances(&m, &one, &[0, 100], st).unwrap();
            let b = conformal_distances(&m, &c, &[0, 100], st).unwrap();
            for (ra, rb) in a.rows.iter().zip(&b.rows) {
                for (x, y) in ra.iter().zip(rb) {
                    // n = 3: lengths scale like c^{2/(n-2)} = c².
                    assert!((6.25 * x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_edge_is_trapezoid() {
        let m = build_torus(3, 1.0, 8).unwrap();
        let u = ConformalField::from_fn(&m, |x| 1.0 + x[0] + 0.3 * x[1]).unwrap();
        let b = m.step(9, 0, true).unwrap();
        let d = conformal_distances(&m, &u, &[9], PathStencil::Axis).unwrap();
        let want = 0.125 * (u.values()[9].powi(2) + u.values()[b].powi(2)) / 2.0;
        assert!((d.rows[0][b] - want).abs() < 1e-15);
    }

    #[test]
    fn round_sphere_geodesics() {
        let m = build_stereo_ball(4, 2.0, 32).unwrap();
        let u = ConformalField::new(&m, bubble_factor(&m, &[0.0; 4], 1.0)).unwrap();
        let o = m.nearest_vertex(&[0.0; 4]).unwrap();
        let d = conformal_distances(&m, &u, &[o], PathStencil::Full).unwrap();
        for p in [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, -1.5, 0.0], [0.5, 0.5, 0.0, 0.0], [0.5, 0.5, 0.5, 0.5]] {
            let v = m.nearest_vertex(&p).unwrap();
            let r = p.iter().map(|a| a * a).sum::<f64>().sqrt();
            let want = 2.0 * r.atan();
            assert!((d.rows[0][v] / want - 1.0).abs() < 0.05, "{p:?}: {} vs {want}", d.rows[0][v]);
        }
    }

    #[test]
    fn axis_diameter_of_unit_torus() {
        let m = build_torus(3, 1.0, 8).unwrap();
        let u = ConformalField::constant(&m, 1.0).unwrap();
        let all: Vec<usize> = (0..m.len()).collect();
        let d = region_diameter(&m, &u, &all, usize::MAX, PathStencil::Axis).unwrap();
        assert!((d - 1.5).abs() < 1e-12);
        let est = region_diameter(&m, &u, &all, 4, PathStencil::Axis).unwrap();
        assert!((est - 1.5).abs() < 1e-12);
        assert_eq!(region_diameter(&m, &u, &[5], 3, PathStencil::Axis).unwrap(), 0.0);
    }

    #[test]
    fn confinement() {
        let m = build_torus(3, 1.0, 8).unwrap();
        let u = ConformalField::constant(&m, 1.0).unwrap();
        let y = m.step(0, 1, true).unwrap();
        let d = confined_distance(&m, &u, 0, y, &[0, y], PathStencil::FaceDiagonal).unwrap();
        assert!(d.connected && (d.distance - 0.125).abs() < 1e-15);
        let far = m.vertex_at(&[4, 4, 4]).unwrap();
        let cut = confined_distance(&m, &u, 0, far, &[0, far], PathStencil::FaceDiagonal).unwrap();
        assert!(!cut.connected && cut.distance.is_infinite());
        let all: Vec<usize> = (0..m.len()).collect();
        let full = confined_distance(&m, &u, 0, far, &all, PathStencil::FaceDiagonal).unwrap();
        let free = conformal_distances(&m, &u, &[0], PathStencil::FaceDiagonal).unwrap();
        assert_eq!(full.distance, free.rows[0][far]);
    }

    #[test]
    fn cylinder_paths_follow_geodesics() {
        let (m, _) = build_cylinder(1.0, 3, 4, 8).unwrap();
        let u = ConformalField::constant(&m, 1.0).unwrap();
        let d = conformal_distances(&m, &u, &[0], PathStencil::Axis).unwrap();
        // Straight t-line from the north-pole vertex of the first layer.
        let per_layer = m.len() / 12;
        assert!((d.rows[0][11 * per_layer] - 11.0 * 0.25).abs() < 1e-12);
        for v in 0..m.len() {
            assert!(d.rows[0][v] >= m.base_distance(0, v) - 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn scaling_and_monotone_confinement(a in 0.0f64..0.5, c in 0.3f64..3.0, x in 0usize..216, y in 0usize..216, cut in 1usize..4) {
            let m = build_torus(3, 1.0, 6).unwrap();
            let u = ConformalField::from_fn(&m, |p| 1.0 + a * (6.0 * p[0]).sin().powi(2)).unwrap();
            let d1 = conformal_distances(&m, &u, &[x], PathStencil::FaceDiagonal).unwrap();
            let d2 = conformal_distances(&m, &u.scaled(c), &[x], PathStencil::FaceDiagonal).unwrap();
            for (p, q) in d1.rows[0].iter().zip(&d2.rows[0]) {
                prop_assert!((c * c * p - q).abs() <= 1e-12 * (1.0 + q));
            }
            let big: Vec<usize> = (0..m.len()).filter(|&v| v % 7 != cut || v == x || v == y).collect();
            let small: Vec<usize> = big.iter().copied().filter(|&v| v % 5 != cut || v == x || v == y).collect();
            let db = confined_distance(&m, &u, x, y, &big, PathStencil::FaceDiagonal).unwrap().distance;
            let ds = confined_distance(&m, &u, x, y, &small, PathStencil::FaceDiagonal).unwrap().distance;
            prop_assert!(ds >= db);
            prop_assert!(db >= d1.rows[0][y]);
        }
    }
}
