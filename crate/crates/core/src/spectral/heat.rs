use statrs::function::gamma::{gamma, gamma_ur};

use super::SpectrumResult;
use crate::grid::unit_ball_volume;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatCompletion {
    /// Sum over the computed modes only.
    Truncated,
    /// Add the Weyl-law estimate for the modes above the last computed one:
    /// with `N(λ) ≈ C λ^{n/2}`, `C = ω_n Vol / (2π)^n`, the tail is
    /// `C Γ(n/2 + 1) t^{-n/2} Q(n/2, t λ_max)` (`Q` the regularized upper
    /// incomplete gamma function).
    WeylTail,
}

/// `Tr(e^{tΔ}) = Σ e^{-λ_i t}`.
pub fn heat_trace(spec: &SpectrumResult, t: f64, completion: HeatCompletion) -> f64 {
    assert!(t > 0.0, "heat trace needs t > 0");
    let trunc: f64 = spec.eigenvalues.iter().map(|l| (-l * t).exp()).sum();
    match completion {
        HeatCompletion::Truncated => trunc,
        HeatCompletion::WeylTail => {
            let n = spec.dim as f64;
            let top = spec.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
            let c = unit_ball_volume(spec.dim) * spec.volume / (2.0 * std::f64::consts::PI).powf(n);
            let q = if top > 0.0 { gamma_ur(n / 2.0, t * top) } else { 1.0 };
            let tail = c * gamma(n / 2.0 + 1.0) * t.powf(-n / 2.0) * q;
            trunc + tail
        }
    }
}

/// Least-squares slope of `log Tr` against `log t` over the given times.
pub fn log_log_slope(spec: &SpectrumResult, times: &[f64], completion: HeatCompletion) -> f64 {
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = times.iter().map(|&t| heat_trace(spec, t, completion).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_and_identity() {
        let s = SpectrumResult::from_eigenvalues(vec![0.0, 1.0, 1.0, 2.5], 3, 10.0);
        assert!((heat_trace(&s, 200.0, HeatCompletion::Truncated) - 1.0).abs() < 1e-12);
        assert!((heat_trace(&s, 1e-9, HeatCompletion::Truncated) - 4.0).abs() < 1e-6);
        let s2 = SpectrumResult::from_eigenvalues(vec![2.5, 1.0, 0.0, 1.0], 3, 99.0);
        for t in [0.01, 0.3, 7.0] {
            assert_eq!(
                heat_trace(&s, t, HeatCompletion::Truncated),
                heat_trace(&s2, t, HeatCompletion::Truncated)
            );
        }
        let mut last = f64::INFINITY;
        for i in 1..50 {
            let v = heat_trace(&s, i as f64 * 0.1, HeatCompletion::Truncated);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn weyl_tail_recovers_leading_term() {
        // Empty computed spectrum: the tail alone is (4πt)^{-n/2} Vol.
        let s = SpectrumResult::from_eigenvalues(vec![0.0], 4, 3.0);
        let t = 0.7;
        let got = heat_trace(&s, t, HeatCompletion::WeylTail) - 1.0;
        let want = 3.0 * (4.0 * std::f64::consts::PI * t).powf(-2.0);
        assert!((got / want - 1.0).abs() < 1e-10);
    }
}
