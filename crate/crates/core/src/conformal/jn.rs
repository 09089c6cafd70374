use super::ConformalField;
use crate::error::{Error, Result};
use crate::grid::{GridManifold, Topology};

/// Volume-weighted mean oscillation `(1/|B|) Σ_B |log u - mean_B(log u)| w`.
pub fn mean_oscillation(m: &GridManifold, u: &ConformalField, ball: &[usize]) -> Result<f64> {
    if ball.is_empty() {
        return Err(Error::EmptyRegion("mean oscillation of an empty ball".into()));
    }
    let w = m.vertex_volume();
    let vol: f64 = ball.iter().map(|&v| w[v]).sum();
    let mean = ball.iter().map(|&v| u.values()[v].ln() * w[v]).sum::<f64>() / vol;
    Ok(ball
        .iter()
        .map(|&v| (u.values()[v].ln() - mean).abs() * w[v])
        .sum::<f64>()
        / vol)
}

/// John-Nirenberg radius at `x`: the largest realized vertex distance `r` such
/// that every ball `B_t(x)`, `t <= r`, inside the domain has mean oscillation
/// of `log u` below `eps_jn`.
///
/// Radii are capped by the distance to the chart boundary and by `r_max`
/// (required on the torus, where no boundary exists). Returns 0 when the
/// smallest nontrivial ball already fails.
pub fn jn_radius(m: &GridManifold, u: &ConformalField, x: usize, eps_jn: f64, r_max: Option<f64>) -> Result<f64> {
    u.check(m)?;
    if !(eps_jn > 0.0) {
        return Err(Error::InvalidArgument(format!("eps_jn must be positive, got {eps_jn}")));
    }
    let limit = match (m.admissible_radius(x), r_max) {
        (Some(a), Some(r)) => a.min(r),
        (Some(a), None) => a,
        (None, Some(r)) => r,
        (None, None) => {
            return Err(Error::InvalidArgument(format!(
                "jn_radius on a {} mesh needs an explicit r_max",
                Topology::Torus.name()
            )))
        }
    };
    let lim2 = limit * limit * (1.0 + 1e-12);
    let mut pts: Vec<(f64, usize)> = (0..m.len())
        .filter_map(|v| {
            let d2 = m.base_distance_sq(x, v);
            (d2 <= lim2).then_some((d2, v))
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let w = m.vertex_volume();
    let logs: Vec<f64> = pts.iter().map(|&(_, v)| u.values()[v].ln()).collect();
    let mut sw = 0.0;
    let mut slw = 0.0;
    let mut best = 0.0;
    let mut i = 0;
    while i < pts.len() {
        // Advance over one group of (numerically) equal distances.
        let d2 = pts[i].0;
        while i < pts.len() && pts[i].0 <= d2 * (1.0 + 1e-12) {
            sw += w[pts[i].1];
            slw += logs[i] * w[pts[i].1];
            i += 1;
        }
        let mean = slw / sw;
        let osc = (0..i).map(|j| (logs[j] - mean).abs() * w[pts[j].1]).sum::<f64>() / sw;
        if osc >= eps_jn {
            break;
        }
        best = d2.sqrt();
    }
    Ok(best)
}
