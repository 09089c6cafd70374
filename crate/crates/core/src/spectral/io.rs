use std::path::Path;

use super::{heat_trace, HeatCompletion, SpectrumResult};
use crate::error::Result;

/// CSV `index,eigenvalue,residual`.
pub fn write_spectrum_csv(path: &Path, spec: &SpectrumResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "eigenvalue", "residual"])?;
    for (i, (l, r)) in spec.eigenvalues.iter().zip(&spec.residuals).enumerate() {
        w.write_record([i.to_string(), l.to_string(), r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV `t,trace`.
pub fn write_heat_csv(path: &Path, spec: &SpectrumResult, times: &[f64], completion: HeatCompletion) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "trace"])?;
    for &t in times {
        w.write_record([t.to_string(), heat_trace(spec, t, completion).to_string()])?;
    }
    w.flush()?;
    Ok(())
}
