//! Curvature-energy concentration: `C(k, x, r) = ∫_{B_r(x)} R_k² dV_{g_k}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{ConformalField, ConformalMetric};
use crate::error::{Error, Result};
use crate::grid::{ball_vertices, GridManifold, Topology};

use super::TailWindow;

/// `R² dV_g` per vertex.
pub fn energy_density(m: &GridManifold, u: &ConformalField) -> Result<Vec<f64>> {
    let g = ConformalMetric::new(m, u)?;
    Ok(g.curvature
        .values
        .iter()
        .zip(&g.vertex_volume)
        .map(|(r, dv)| r * r * dv)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationProfile {
    pub centers: Vec<usize>,
    pub radii: Vec<f64>,
    pub family_len: usize,
    /// Row-major `[k][center][radius]`.
    pub energy: Vec<f64>,
}

impl ConcentrationProfile {
    pub fn get(&self, k: usize, c: usize, r: usize) -> f64 {
        self.energy[(k * self.centers.len() + c) * self.radii.len() + r]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationScan {
    pub profile: ConcentrationProfile,
    /// One representative per cluster of concentrating centers, ascending.
    pub bubble_points: Vec<usize>,
    pub tail: TailWindow,
    /// Per center, `min_{k in tail} C(k, x, r_min)`.
    pub tail_energy: Vec<f64>,
}

/// Scan `C(k, x, r)` over a family on one manifold.
///
/// A center concentrates when the tail minimum of `C(k, x, r_min)` exceeds
/// `eps_detect`. Concentrating centers within `2 r_min` of each other are one
/// bubble (single linkage); each cluster reports its center of largest tail
/// energy, ties to the smaller vertex id.
pub fn concentration_scan(
    m: &GridManifold,
    family: &[ConformalField],
    centers: &[usize],
    radii: &[f64],
    eps_detect: f64,
) -> Result<ConcentrationScan> {
    if family.is_empty() || centers.is_empty() || radii.is_empty() {
        return Err(Error::InvalidArgument("concentration_scan needs a family, centers and radii".into()));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
        return Err(Error::InvalidArgument("radii must be positive and strictly increasing".into()));
    }
    if let Some(&c) = centers.iter().find(|&&c| c >= m.len()) {
        return Err(Error::InvalidArgument(format!("center {c} is not a vertex")));
    }
    let densities = family
        .par_iter()
        .map(|u| energy_density(m, u))
        .collect::<Result<Vec<_>>>()?;
    let r_max = *radii.last().unwrap();
    let nr = radii.len();
    // Per center, all members at once: shell sums by the first radius that
    // contains each ball vertex, then running sums.
    let k_len = family.len();
    let per_center: Vec<Vec<f64>> = centers
        .par_iter()
        .map(|&c| {
            let mut shells = vec![0.0; k_len * nr];
            for v in ball_vertices(m, c, r_max) {
                let d = m.base_distance(c, v);
                let slot = radii.partition_point(|&r| r * (1.0 + 1e-12) < d);
                for (k, dens) in densities.iter().enumerate() {
                    shells[k * nr + slot] += dens[v];
                }
            }
            for k in 0..k_len {
                for r in 1..nr {
                    shells[k * nr + r] += shells[k * nr + r - 1];
                }
            }
            shells
        })
        .collect();
    let mut energy = vec![0.0; k_len * centers.len() * nr];
    for (c, shells) in per_center.iter().enumerate() {
        for k in 0..k_len {
            let dst = (k * centers.len() + c) * nr;
            energy[dst..dst + nr].copy_from_slice(&shells[k * nr..(k + 1) * nr]);
        }
    }
    let profile = ConcentrationProfile {
        centers: centers.to_vec(),
        radii: radii.to_vec(),
        family_len: family.len(),
        energy,
    };
    let tail = TailWindow::last_quarter(family.len());
    let tail_energy: Vec<f64> = (0..centers.len())
        .map(|c| {
            (tail.start..tail.end)
                .map(|k| profile.get(k, c, 0))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let hot: Vec<usize> = (0..centers.len()).filter(|&c| tail_energy[c] > eps_detect).collect();
    let bubble_points = cluster(m, centers, &hot, &tail_energy, 2.0 * radii[0]);
    Ok(ConcentrationScan {
        profile,
        bubble_points,
        tail,
        tail_energy,
    })
}

fn cluster(m: &GridManifold, centers: &[usize], hot: &[usize], score: &[f64], link: f64) -> Vec<usize> {
    let mut label: Vec<usize> = (0..hot.len()).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..hot.len() {
        for j in i + 1..hot.len() {
            if m.base_distance(centers[hot[i]], centers[hot[j]]) <= link * (1.0 + 1e-12) {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut best: std::collections::BTreeMap<usize, usize> = Default::default();
    for i in 0..hot.len() {
        let r = root(&mut label, i);
        let c = hot[i];
        let e = best.entry(r).or_insert(c);
        let (old, new) = (score[*e], score[c]);
        if new > old || (new == old && centers[c] < centers[*e]) {
            *e = c;
        }
    }
    let mut out: Vec<usize> = best.values().map(|&c| centers[c]).collect();
    out.sort_unstable();
    out
}

/// Smallest ball reaching a curvature-energy level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationScale {
    pub center: usize,
    pub radius: f64,
    /// `∫_{B_radius(center)} R² dV` (at least the requested level).
    pub energy: f64,
}

/// The smallest realized radius `r` such that some ball `B_r(x)` carries
/// curvature energy `>= level`, with the smallest such `x`. `None` when no
/// ball in the chart reaches the level.
///
/// Radii range over the distances realized by lattice offsets. Candidate
/// centers are pruned with box sums from a summed-area table before exact
/// ball sums are taken.
pub fn first_concentration_scale(m: &GridManifold, u: &ConformalField, level: f64) -> Result<Option<ConcentrationScale>> {
    first_concentration_scale_among(m, u, level, None)
}

/// As [`first_concentration_scale`], with ball centers restricted to `centers`.
pub fn first_concentration_scale_among(
    m: &GridManifold,
    u: &ConformalField,
    level: f64,
    centers: Option<&[usize]>,
) -> Result<Option<ConcentrationScale>> {
    if !(level > 0.0) {
        return Err(Error::InvalidArgument(format!("level must be positive, got {level}")));
    }
    if m.topology() == Topology::CylinderS3 {
        return Err(Error::Unsupported {
            op: "first_concentration_scale",
            topology: m.topology().name(),
        });
    }
    let e = energy_density(m, u)?;
    if e.iter().sum::<f64>() < level {
        return Ok(None);
    }
    let n = m.dim();
    let h = m.spacing()[0];
    let k_max = if m.periodic[0] { m.shape[0] / 2 } else { m.shape[0] - 1 };
    let table = BoxTable::new(m, &e, k_max);
    let pool: Vec<usize> = match centers {
        Some(c) => {
            let mut c = c.to_vec();
            c.sort_unstable();
            c.dedup();
            if c.last().map_or(false, |&v| v >= m.len()) {
                return Err(Error::InvalidArgument("center is not a vertex".into()));
            }
            c
        }
        None => (0..m.len()).collect(),
    };
    // Realized radii: h·sqrt(s) for sums of n squares with |offset| <= k_max.
    let mut sums = vec![false; n * k_max * k_max + 1];
    let mut stack = vec![(0usize, 0usize)];
    while let Some((axis, s)) = stack.pop() {
        if axis == n {
            sums[s] = true;
            continue;
        }
        for i in 0..=k_max {
            stack.push((axis + 1, s + i * i));
        }
    }
    let radii: Vec<f64> = (0..sums.len())
        .filter(|&s| sums[s])
        .map(|s| h * (s as f64).sqrt())
        .collect();
    let witness = |r: f64, first_only: bool| -> Option<(usize, f64)> {
        let k = ((r / h) * (1.0 + 1e-12)).floor() as usize;
        let mut cand: Vec<(f64, usize)> = pool
            .iter()
            .filter_map(|&v| {
                let b = table.box_sum(m, v, k);
                (b >= level).then_some((b, v))
            })
            .collect();
        if first_only {
            cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        }
        let r2 = r * r * (1.0 + 1e-12);
        for (_, v) in cand {
            let s = ball_sum(m, &e, v, k, r2);
            if s >= level {
                return Some((v, s));
            }
        }
        None
    };
    // Exponential search for a radius index that reaches the level, then
    // bisection below it. Large balls are expensive, so they come last.
    let last = radii.len() - 1;
    let mut hi = 0usize;
    let mut lo = 0usize;
    loop {
        if witness(radii[hi], true).is_some() {
            break;
        }
        if hi == last {
            return Ok(None);
        }
        lo = hi + 1;
        hi = (2 * hi + 1).min(last);
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if witness(radii[mid], true).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let r = radii[lo];
    let (center, energy) = witness(r, false).expect("monotone predicate");
    Ok(Some(ConcentrationScale { center, radius: r, energy }))
}

/// `Σ e` over lattice offsets `o` with `|o|_∞ <= k` and `h²|o|² <= r2`
/// around `v`. On periodic axes offsets are minimum-image, so each vertex is
/// counted once at its torus distance.
fn ball_sum(m: &GridManifold, e: &[f64], v: usize, k: usize, r2: f64) -> f64 {
    let n = m.dim();
    let h = m.spacing();
    let c = m.lattice_index(v);
    let mut lo = [0isize; 4];
    let mut hi = [0isize; 4];
    for a in 0..n {
        lo[a] = -(k as isize);
        hi[a] = k as isize;
        if m.periodic[a] {
            // Minimum-image offsets: one period, centered.
            let s = m.shape[a] as isize;
            lo[a] = lo[a].max(-(s / 2));
            hi[a] = hi[a].min(s - 1 - s / 2);
        }
    }
    let mut off = lo;
    let mut idx = [0isize; 4];
    let mut acc = 0.0;
    loop {
        let d2: f64 = (0..n).map(|a| (off[a] as f64 * h[a]).powi(2)).sum();
        if d2 <= r2 {
            for a in 0..n {
                idx[a] = c[a] as isize + off[a];
            }
            if let Some(w) = m.vertex_at(&idx[..n]) {
                acc += e[w];
            }
        }
        let mut a = n;
        loop {
            if a == 0 {
                return acc;
            }
            a -= 1;
            if off[a] < hi[a] {
                off[a] += 1;
                break;
            }
            off[a] = lo[a];
        }
    }
}

/// Summed-area table over the lattice, padded periodically on the torus.
struct BoxTable {
    shape: Vec<usize>,
    strides: Vec<usize>,
    pad: usize,
    sum: Vec<f64>,
}

impl BoxTable {
    fn new(m: &GridManifold, e: &[f64], k_max: usize) -> Self {
        let n = m.dim();
        let periodic = m.periodic[0];
        let pad = if periodic { k_max } else { 0 };
        let shape: Vec<usize> = m.shape.iter().map(|&s| s + 2 * pad).collect();
        let mut strides = vec![1; n];
        for a in (0..n - 1).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        let total: usize = shape.iter().product();
        let mut sum = vec![0.0; total];
        let mut idx = vec![0usize; n];
        for (lin, s) in sum.iter_mut().enumerate() {
            let mut rem = lin;
            for a in 0..n {
                idx[a] = rem / strides[a];
                rem %= strides[a];
            }
            let mut src = 0usize;
            for a in 0..n {
                let i = (idx[a] + m.shape[a] - pad % m.shape[a]) % m.shape[a];
                src += i * m.strides[a];
            }
            let v = m.vertex_at[src];
            if v != crate::grid::NONE {
                *s = e[v as usize];
            }
        }
        for a in 0..n {
            for lin in 0..total {
                if (lin / strides[a]) % shape[a] > 0 {
                    sum[lin] += sum[lin - strides[a]];
                }
            }
        }
        BoxTable { shape, strides, pad, sum }
    }

    /// Sum over the lattice cube of half-width `k` around `v` (an upper bound
    /// for any ball of radius `< (k + 1) h`).
    fn box_sum(&self, m: &GridManifold, v: usize, k: usize) -> f64 {
        let n = self.shape.len();
        let c = m.lattice_index(v);
        let mut lo = vec![0isize; n];
        let mut hi = vec![0isize; n];
        for a in 0..n {
            let p = c[a] + self.pad;
            lo[a] = p as isize - k as isize - 1;
            hi[a] = (p + k).min(self.shape[a] - 1) as isize;
        }
        let mut total = 0.0;
        'corner: for mask in 0..(1usize << n) {
            let mut lin = 0usize;
            let mut sign = 1.0;
            for a in 0..n {
                let i = if mask >> a & 1 == 1 {
                    sign = -sign;
                    lo[a]
                } else {
                    hi[a]
                };
                if i < 0 {
                    continue 'corner;
                }
                lin += i as usize * self.strides[a];
            }
            total += sign * self.sum[lin];
        }
        total
    }
}
