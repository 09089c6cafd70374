//! Blowup rescaling `v(y) = r^{(n-2)/2} u(x + r y)` and comparison of
//! blowup sequences.

use serde::{Deserialize, Serialize};

use crate::conformal::{ConformalField, ConformalMetric};
use crate::error::{Error, Result};
use crate::grid::{ball_vertices, GridManifold, Topology};

use super::TailWindow;

/// Rescale `u` around the point `x` by `r` onto the chart `target`.
pub fn blowup_rescale(m: &GridManifold, u: &ConformalField, x: &[f64], r: f64, target: &GridManifold) -> Result<ConformalField> {
    if target.topology() != Topology::StereoBall || target.dim() != m.dim() {
        return Err(Error::InvalidArgument("blowup target must be a ball chart of the same dimension".into()));
    }
    if !(r > 0.0 && r.is_finite()) || x.len() != m.dim() {
        return Err(Error::InvalidArgument(format!("bad blowup center or scale {r}")));
    }
    let reach = r * target_cutoff(target);
    match m.topology() {
        Topology::CylinderS3 => {
            return Err(Error::Unsupported {
                op: "blowup_rescale",
                topology: m.topology().name(),
            })
        }
        Topology::Torus => {
            let side = m.spacing()[0] * m.shape()[0] as f64;
            if 2.0 * reach > side {
                return Err(Error::OutsideChart(format!("rescaled chart of radius {reach} exceeds half the torus")));
            }
        }
        Topology::StereoBall => {}
    }
    if u.len() != m.len() {
        return Err(Error::FieldLength {
            expected: m.len(),
            got: u.len(),
        });
    }
    let factor = r.powf((m.dim() as f64 - 2.0) / 2.0);
    let mut p = vec![0.0; m.dim()];
    let mut values = Vec::with_capacity(target.len());
    for v in 0..target.len() {
        for (a, y) in target.coords(v).iter().enumerate() {
            p[a] = x[a] + r * y;
        }
        let val = m
            .interpolate(u.values(), &p)
            .ok_or_else(|| Error::OutsideChart(format!("rescaled point {p:?} leaves the source chart")))?;
        values.push(factor * val);
    }
    ConformalField::new(target, values)
}

fn target_cutoff(t: &GridManifold) -> f64 {
    match t.descriptor() {
        crate::grid::MeshDescriptor::StereoBall { cutoff, .. } => *cutoff,
        _ => unreachable!("checked by the caller"),
    }
}

/// `∫_{B_{rρ}(x)} R_u² dV_u` against `∫_{B_ρ(0)} R_v² dV_v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCheck {
    pub original: f64,
    pub rescaled: f64,
}

impl EnergyCheck {
    pub fn relative_gap(&self) -> f64 {
        (self.rescaled - self.original).abs() / self.original.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn blowup_energy_check(
    m: &GridManifold,
    u: &ConformalField,
    x: usize,
    r: f64,
    target: &GridManifold,
    v: &ConformalField,
    rho: f64,
) -> Result<EnergyCheck> {
    let o = target
        .nearest_vertex(&vec![0.0; target.dim()])
        .ok_or_else(|| Error::OutsideChart("target chart has no origin".into()))?;
    let sum = |mesh: &GridManifold, f: &ConformalField, c: usize, rad: f64| -> Result<f64> {
        let g = ConformalMetric::new(mesh, f)?;
        Ok(ball_vertices(mesh, c, rad)
            .into_iter()
            .map(|w| g.curvature.values[w].powi(2) * g.vertex_volume[w])
            .sum())
    };
    Ok(EnergyCheck {
        original: sum(m, u, x, r * rho)?,
        rescaled: sum(target, v, o, rho)?,
    })
}

/// Floors deciding whether a rescaled family has a nonzero limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RealBubbleFloors {
    /// Lower bound on `min_{B_1} v` along the tail.
    pub min_floor: f64,
    /// Lower bound on `∫_{B_1} v^{2n/(n-2)} dx` along the tail.
    pub volume_floor: f64,
}

impl Default for RealBubbleFloors {
    fn default() -> Self {
        // The blown-up B_1 has the g-volume of the original ball. On a
        // volume-normalized family whose bubble carries energy E, a ball of
        // energy `level` has volume about level / E, i.e. 0.025 at half the
        // default detection level.
        RealBubbleFloors {
            min_floor: 0.05,
            volume_floor: 0.01,
        }
    }
}

/// `min_{B_1} v` and `∫_{B_1} v^{2n/(n-2)} dx` of a rescaled field.
pub fn unit_ball_stats(target: &GridManifold, v: &ConformalField) -> Result<(f64, f64)> {
    v.check(target)?;
    let o = target
        .nearest_vertex(&vec![0.0; target.dim()])
        .ok_or_else(|| Error::OutsideChart("target chart has no origin".into()))?;
    let ball = ball_vertices(target, o, 1.0);
    let e = crate::conformal::Exponents::for_dim(target.dim()).volume;
    let w = target.vertex_volume();
    let vals = v.values();
    let min = ball.iter().map(|&b| vals[b]).fold(f64::INFINITY, f64::min);
    let vol = ball.iter().map(|&b| crate::conformal::upow(vals[b], e) * w[b]).sum();
    Ok((min, vol))
}

/// Whether every rescaled field in the tail stays above both floors on `B_1`.
pub fn is_real_bubble(target: &GridManifold, tail: &[ConformalField], floors: &RealBubbleFloors) -> Result<bool> {
    for v in tail {
        let (min, vol) = unit_ball_stats(target, v)?;
        if !(min > floors.min_floor && vol > floors.volume_floor) {
            return Ok(false);
        }
    }
    Ok(!tail.is_empty())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupSequence {
    pub centers: Vec<usize>,
    pub scales: Vec<f64>,
}

impl BlowupSequence {
    pub fn new(centers: Vec<usize>, scales: Vec<f64>) -> Result<Self> {
        if centers.len() != scales.len() || centers.is_empty() {
            return Err(Error::InvalidArgument("blowup sequence needs one scale per center".into()));
        }
        if scales.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidArgument("blowup scales must be positive".into()));
        }
        Ok(BlowupSequence { centers, scales })
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    /// Scales never increase along the sequence.
    pub fn is_nonincreasing(&self) -> bool {
        self.scales.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    EssentiallySame,
    Separated,
    Nested,
    Indeterminate,
}

/// Classify two blowup sequences on the tail window.
///
/// * essentially-same: `d < r2/r1 < d'` (in either order) and
///   `|x1 - x2| / (r1 + r2) <= d''` on every tail index;
/// * separated: that offset exceeds `d''` on the tail, never decreases along the
///   tail, and its log has positive least-squares slope over all indices;
/// * nested: `min(r1/r2, r2/r1) <= d` and decreasing on the tail, with
///   `|x1 - x2| / max(r1, r2) <= d''`.
pub fn classify_pair(
    m: &GridManifold,
    s1: &BlowupSequence,
    s2: &BlowupSequence,
    d: f64,
    d_prime: f64,
    d_double_prime: f64,
) -> Result<PairClass> {
    if s1.len() != s2.len() || s1.is_empty() {
        return Err(Error::InvalidArgument("blowup sequences must have equal, nonzero length".into()));
    }
    let kk = s1.len();
    let tail = TailWindow::last_quarter(kk);
    let dist: Vec<f64> = (0..kk).map(|k| m.base_distance(s1.centers[k], s2.centers[k])).collect();
    let offset: Vec<f64> = (0..kk).map(|k| dist[k] / (s1.scales[k] + s2.scales[k])).collect();
    let ratio: Vec<f64> = (0..kk).map(|k| s2.scales[k] / s1.scales[k]).collect();
    let t = tail.start..tail.end;

    let in_band = |q: f64| d < q && q < d_prime;
    if t.clone().all(|k| (in_band(ratio[k]) || in_band(1.0 / ratio[k])) && offset[k] <= d_double_prime) {
        return Ok(PairClass::EssentiallySame);
    }
    // Scales are quantized to lattice radii, so consecutive tail offsets can
    // tie; the slope test rules out a constant offset.
    let nondecreasing = t.clone().skip(1).all(|k| offset[k] >= offset[k - 1]);
    if t.clone().all(|k| offset[k] > d_double_prime) && nondecreasing && log_slope(&offset) > 0.0 {
        return Ok(PairClass::Separated);
    }
    let small: Vec<f64> = ratio.iter().map(|&q| q.min(1.0 / q)).collect();
    let decreasing = t.clone().skip(1).all(|k| small[k] < small[k - 1]);
    let bounded = t
        .clone()
        .all(|k| dist[k] / s1.scales[k].max(s2.scales[k]) <= d_double_prime);
    if t.clone().all(|k| small[k] <= d) && decreasing && bounded {
        return Ok(PairClass::Nested);
    }
    Ok(PairClass::Indeterminate)
}

/// Least-squares slope of `ln x_k` against `k`; 0 for one point, `-inf`
/// when some value is zero.
fn log_slope(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let ys: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    super::fit_line(&ys).0
}
