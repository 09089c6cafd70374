use super::ConformalField;
use crate::error::{Error, Result};
use crate::grid::{ball_vertices, GridManifold};

/// The three integrated pieces of a discrete `W^{k,p}` norm, plus the base
/// volume of the vertices that had a full central-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevTerms {
    /// `Σ |f|^p w`.
    pub zeroth: f64,
    /// `Σ |∇f|^p w` (0 when order < 1).
    pub first: f64,
    /// `Σ |∇²f|^p w` with the Frobenius norm (0 when order < 2).
    pub second: f64,
    pub volume: f64,
    /// Vertices skipped because a stencil point was missing.
    pub excluded: usize,
}

impl SobolevTerms {
    pub fn norm(&self, p: f64) -> f64 {
        (self.zeroth + self.first + self.second).powf(1.0 / p)
    }
}

/// Central-difference derivative terms over `region` (all vertices if `None`).
/// Boundary strips where a central stencil is unavailable are excluded.
pub fn sobolev_terms(
    m: &GridManifold,
    f: &[f64],
    order: usize,
    p: f64,
    region: Option<&[usize]>,
) -> Result<SobolevTerms> {
    if !m.topology().is_flat() {
        return Err(Error::Unsupported {
            op: "sobolev_norm",
            topology: m.topology().name(),
        });
    }
    if order > 2 || !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("need order <= 2 and p >= 1, got order {order}, p {p}")));
    }
    if f.len() != m.len() {
        return Err(Error::FieldLength {
            expected: m.len(),
            got: f.len(),
        });
    }
    let n = m.dim();
    let h = m.spacing()[0];
    let w = m.vertex_volume();
    let all: Vec<usize>;
    let region = match region {
        Some(r) => r,
        None => {
            all = (0..m.len()).collect();
            &all
        }
    };
    let mut t = SobolevTerms {
        zeroth: 0.0,
        first: 0.0,
        second: 0.0,
        volume: 0.0,
        excluded: 0,
    };
    'vertex: for &v in region {
        let c: Vec<isize> = m.lattice_index(v).iter().map(|&i| i as isize).collect();
        let at = |da: &[(usize, isize)]| -> Option<f64> {
            let mut p = c.clone();
            for &(a, d) in da {
                p[a] += d;
            }
            m.vertex_at(&p).map(|u| f[u])
        };
        let mut grad2 = 0.0;
        let mut hess2 = 0.0;
        if order >= 1 {
            for a in 0..n {
                let (Some(fp), Some(fm)) = (at(&[(a, 1)]), at(&[(a, -1)])) else {
                    t.excluded += 1;
                    continue 'vertex;
                };
                grad2 += ((fp - fm) / (2.0 * h)).powi(2);
                if order == 2 {
                    hess2 += ((fp - 2.0 * f[v] + fm) / (h * h)).powi(2);
                }
            }
        }
        if order == 2 {
            for a in 0..n {
                for b in a + 1..n {
                    let corners = [
                        at(&[(a, 1), (b, 1)]),
                        at(&[(a, 1), (b, -1)]),
                        at(&[(a, -1), (b, 1)]),
                        at(&[(a, -1), (b, -1)]),
                    ];
                    let [Some(pp), Some(pm), Some(mp), Some(mm)] = corners else {
                        t.excluded += 1;
                        continue 'vertex;
                    };
                    let fab = (pp - pm - mp + mm) / (4.0 * h * h);
                    hess2 += 2.0 * fab * fab;
                }
            }
        }
        t.zeroth += f[v].abs().powf(p) * w[v];
        t.first += grad2.sqrt().powf(p) * w[v];
        t.second += hess2.sqrt().powf(p) * w[v];
        t.volume += w[v];
    }
    if order < 1 {
        t.first = 0.0;
    }
    if order < 2 {
        t.second = 0.0;
    }
    Ok(t)
}

/// `(Σ (|f|^p + |∇f|^p [order >= 1] + |∇²f|^p [order >= 2]) w)^{1/p}` over the
/// vertices with a full central stencil.
pub fn sobolev_norm(m: &GridManifold, f: &[f64], order: usize, p: f64) -> Result<f64> {
    Ok(sobolev_terms(m, f, order, p, None)?.norm(p))
}

/// `‖u‖_{W^{2,p}(B_{r/2}(x))} / ‖u‖_{L^4(B_r(x))}`.
pub fn regularity_ratio(m: &GridManifold, u: &ConformalField, x: usize, r: f64, p: f64) -> Result<f64> {
    u.check(m)?;
    let fits = match m.admissible_radius(x) {
        Some(a) => r <= a * (1.0 + 1e-12),
        None => r <= m.shape()[0] as f64 * m.spacing()[0] / 2.0,
    };
    if !fits || !(r > 0.0) {
        return Err(Error::OutsideChart(format!("ball of radius {r} around vertex {x} leaves the domain")));
    }
    let inner = ball_vertices(m, x, r / 2.0);
    let num = sobolev_terms(m, u.values(), 2, p, Some(&inner))?.norm(p);
    let w = m.vertex_volume();
    let den = ball_vertices(m, x, r)
        .iter()
        .map(|&v| u.values()[v].powi(4) * w[v])
        .sum::<f64>()
        .powf(0.25);
    if den < 1e-14 {
        return Err(Error::InvalidArgument(format!("L4 norm {den:e} too small for a ratio")));
    }
    Ok(num / den)
}
