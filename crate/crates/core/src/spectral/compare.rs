use serde::{Deserialize, Serialize};

use super::{SpectrumResult, ZERO_MODE_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsospectralReport {
    /// Relative gap per index (absolute gap for pairs of zero modes).
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    pub rel_tol: f64,
    pub pass: bool,
}

pub fn isospectral_compare(
    s1: &SpectrumResult,
    s2: &SpectrumResult,
    count: usize,
    rel_tol: f64,
) -> Result<IsospectralReport> {
    if s1.eigenvalues.len() < count || s2.eigenvalues.len() < count {
        return Err(Error::InvalidArgument(format!(
            "need {count} eigenvalues, have {} and {}",
            s1.eigenvalues.len(),
            s2.eigenvalues.len()
        )));
    }
    let gaps: Vec<f64> = s1.eigenvalues[..count]
        .iter()
        .zip(&s2.eigenvalues[..count])
        .map(|(&a, &b)| {
            let scale = a.abs().max(b.abs());
            if scale <= ZERO_MODE_TOL {
                (a - b).abs()
            } else {
                (a - b).abs() / scale
            }
        })
        .collect();
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    Ok(IsospectralReport {
        gaps,
        max_gap,
        rel_tol,
        pass: max_gap <= rel_tol,
    })
}
