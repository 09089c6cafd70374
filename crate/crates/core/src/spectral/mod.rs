//! Spectrum of `Δ_g` for `g = u^{4/(n-2)} g0`, heat traces, Rayleigh
//! quotients and the pinching test function.
//!
//! The discrete problem is the pencil
//!
//! ```text
//! K_ab = -c_ab (u_a² + u_b²)/2   (a ≠ b),      M_aa = u_a^{2n/(n-2)} w_a,
//! ```
//!
//! i.e. `∫|∇_g f|² dV_g = ∫ u² |∇0 f|² dV0` against `∫ f² dV_g`.

mod compare;
mod heat;
mod io;
mod pinch;
mod solver;

pub use compare::{isospectral_compare, IsospectralReport};
pub use heat::{heat_trace, log_log_slope, HeatCompletion};
pub use io::{write_heat_csv, write_spectrum_csv};
pub use pinch::{pinch_test, pinch_test_with_ramp, PinchResult};
pub use solver::{Pencil, SolverOptions};

use serde::{Deserialize, Serialize};

use crate::conformal::{upow, ConformalField, Exponents};
use crate::error::{Error, Result};
use crate::grid::GridManifold;

/// Eigenvalues at or below this are treated as the constant mode.
pub const ZERO_MODE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Smallest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// First eigenvalue above [`ZERO_MODE_TOL`], if any was computed.
    pub lambda1: Option<f64>,
    /// Relative residual of each eigenpair.
    pub residuals: Vec<f64>,
    pub dim: usize,
    /// `Vol(M, g)`, used by the Weyl-law tail.
    pub volume: f64,
    /// Eigenfunctions, `dV_g`-orthonormal, when requested.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SpectrumResult {
    /// Wrap an externally known eigenvalue list (e.g. closed-form spectra).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, dim: usize, volume: f64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let lambda1 = eigenvalues.iter().copied().find(|&l| l > ZERO_MODE_TOL);
        SpectrumResult {
            residuals: vec![0.0; eigenvalues.len()],
            eigenvalues,
            lambda1,
            dim,
            volume,
            eigenvectors: Vec::new(),
        }
    }
}

/// Assemble the stiffness/mass pencil of `Δ_g`.
pub fn pencil(m: &GridManifold, u: &ConformalField) -> Result<Pencil> {
    if u.len() != m.len() {
        return Err(Error::FieldLength {
            expected: m.len(),
            got: u.len(),
        });
    }
    let ex = Exponents::for_dim(m.dim());
    let uv = u.values();
    let mut row = Vec::with_capacity(m.len() + 1);
    let mut col = Vec::new();
    let mut val = Vec::new();
    let mut diag = vec![0.0; m.len()];
    row.push(0);
    for a in 0..m.len() {
        for e in m.edges(a) {
            let k = e.conductance * 0.5 * (uv[a] * uv[a] + uv[e.to] * uv[e.to]);
            col.push(e.to as u32);
            val.push(-k);
            diag[a] += k;
        }
        row.push(col.len());
    }
    let mass = uv
        .iter()
        .zip(m.vertex_volume())
        .map(|(&u, &w)| upow(u, ex.volume) * w)
        .collect();
    Ok(Pencil {
        row,
        col,
        val,
        diag,
        mass,
    })
}

/// The `count` smallest eigenvalues of `Δ_g` (with eigenfunctions).
pub fn laplace_spectrum(
    m: &GridManifold,
    u: &ConformalField,
    count: usize,
    opts: &SolverOptions,
) -> Result<SpectrumResult> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 eigenvalues, asked for {count}")));
    }
    let p = pencil(m, u)?;
    let pairs = solver::smallest_eigenpairs(&p, count, opts)?;
    let lambda1 = pairs.values.iter().copied().find(|&l| l > ZERO_MODE_TOL);
    Ok(SpectrumResult {
        eigenvalues: pairs.values,
        lambda1,
        residuals: pairs.residuals,
        dim: m.dim(),
        volume: p.mass.iter().sum(),
        eigenvectors: pairs.vectors,
    })
}

/// `∫|∇_g f|² dV_g / ∫(f - f̄)² dV_g` with `f̄` the `dV_g`-mean.
pub fn rayleigh_quotient(m: &GridManifold, u: &ConformalField, f: &[f64]) -> Result<f64> {
    let p = pencil(m, u)?;
    if f.len() != m.len() {
        return Err(Error::FieldLength {
            expected: m.len(),
            got: f.len(),
        });
    }
    Ok(quotient(&p, f)?)
}

pub(crate) fn quotient(p: &Pencil, f: &[f64]) -> Result<f64> {
    let vol: f64 = p.mass.iter().sum();
    let mean = f.iter().zip(&p.mass).map(|(a, b)| a * b).sum::<f64>() / vol;
    let var: f64 = f.iter().zip(&p.mass).map(|(a, b)| (a - mean).powi(2) * b).sum();
    let scale: f64 = f.iter().zip(&p.mass).map(|(a, b)| a * a * b).sum();
    if !(var > 1e-14 * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::InvalidArgument("Rayleigh quotient of a constant field".into()));
    }
    Ok(p.energy(f) / var)
}
