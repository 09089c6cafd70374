//! Closed-form conformal factors used as ground truth.

use crate::grid::GridManifold;

/// Stereographic bubble of scale `lambda` centered at `center` (chart
/// coordinates): `u^{4/(n-2)} = (2 lambda / (lambda^2 + |x - c|^2))^2`, the
/// round unit sphere pulled back to the chart. `lambda = 1, c = 0` is the
/// standard stereographic factor.
pub fn bubble_factor(m: &GridManifold, center: &[f64], lambda: f64) -> Vec<f64> {
    (0..m.len())
        .map(|v| bubble_value(m.dim(), m.coords(v), center, lambda))
        .collect()
}

pub fn bubble_value(n: usize, x: &[f64], center: &[f64], lambda: f64) -> f64 {
    let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
    let base = 2.0 * lambda / (lambda * lambda + r2);
    match n {
        4 => base,
        3 => base.sqrt(),
        _ => base.powf((n as f64 - 2.0) / 2.0),
    }
}
