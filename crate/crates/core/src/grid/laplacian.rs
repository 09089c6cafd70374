use rayon::prelude::*;

use super::GridManifold;

/// Discrete Laplace-Beltrami operator of the base metric.
///
/// Interior vertices use the divergence-form stencil. At a boundary vertex the
/// complete axes still use the flux form, while an axis with a missing
/// neighbor uses the one-sided second difference `(2f0 - 5f1 + 4f2 - f3)/h^2`
/// (falling back to `(f0 - 2f1 + f2)/h^2` when the chain is too short).
/// Which vertices were treated one-sidedly is `M.boundary_mask()`.
pub fn laplacian_apply(m: &GridManifold, f: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), m.len(), "field length does not match the mesh");
    (0..m.len())
        .into_par_iter()
        .map(|v| {
            if m.boundary[v] {
                boundary_value(m, f, v)
            } else {
                flux(m, f, v, None)
            }
        })
        .collect()
}

fn flux(m: &GridManifold, f: &[f64], v: usize, axis: Option<usize>) -> f64 {
    let s = &m.stencil;
    let mut acc = 0.0;
    for e in s.range(v) {
        if axis.map_or(true, |a| (s.tag[e] >> 1) as usize == a) {
            acc += s.conductance(e) * (f[s.nbr[e] as usize] - f[v]);
        }
    }
    acc / m.volume[v]
}

/// Neighbor of `v` along the stencil edge with the given tag.
pub(crate) fn follow(m: &GridManifold, v: usize, tag: u8) -> Option<usize> {
    let s = &m.stencil;
    s.range(v).find(|&e| s.tag[e] == tag).map(|e| s.nbr[e] as usize)
}

fn boundary_value(m: &GridManifold, f: &[f64], v: usize) -> f64 {
    let mut total = 0.0;
    for axis in 0..m.shape.len() {
        let minus = follow(m, v, (axis as u8) << 1);
        let plus = follow(m, v, (axis as u8) << 1 | 1);
        let open = m.open_axes.contains(&axis);
        if !open || (minus.is_some() && plus.is_some()) {
            total += flux(m, f, v, Some(axis));
            continue;
        }
        let tag = match (minus, plus) {
            (None, Some(_)) => (axis as u8) << 1 | 1,
            (Some(_), None) => (axis as u8) << 1,
            // Isolated along this axis: no second-derivative information.
            _ => continue,
        };
        let mut chain = [v; 4];
        let mut len = 1;
        while len < 4 {
            match follow(m, chain[len - 1], tag) {
                Some(u) => {
                    chain[len] = u;
                    len += 1;
                }
                None => break,
            }
        }
        let h2 = m.spacing[axis] * m.spacing[axis];
        let [f0, f1, f2, f3] = chain.map(|u| f[u]);
        total += match len {
            4 => (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / h2,
            3 => (f0 - 2.0 * f1 + f2) / h2,
            _ => 0.0,
        };
    }
    total
}
