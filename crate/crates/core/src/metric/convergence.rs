//! Uniform convergence of distance functions on a shared point set.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

use super::paths::DistanceRows;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Per family member, `sup |d_k - d_u|` over source pairs with neither
    /// point excluded.
    pub local: Vec<f64>,
    /// Same over all source pairs.
    pub global: Vec<f64>,
    /// Sources that fell in the excluded region.
    pub excluded_sources: usize,
}

/// Compare each member of `family` with `reference` on their common sources.
pub fn uniform_convergence_report(
    family: &[DistanceRows],
    reference: &DistanceRows,
    excluded: &[usize],
) -> Result<ConvergenceReport> {
    let d_ref = reference.source_matrix();
    let k = reference.sources.len();
    let keep: Vec<bool> = reference.sources.iter().map(|s| !excluded.contains(s)).collect();
    let mut local = Vec::with_capacity(family.len());
    let mut global = Vec::with_capacity(family.len());
    for (idx, rows) in family.iter().enumerate() {
        if rows.sources != reference.sources {
            return Err(Error::PointSetMismatch(format!(
                "family member {idx} uses different sources than the reference"
            )));
        }
        let d = rows.source_matrix();
        let (mut lo, mut gl) = (0.0f64, 0.0f64);
        for i in 0..k {
            for j in 0..k {
                let gap = (d[i * k + j] - d_ref[i * k + j]).abs();
                gl = gl.max(gap);
                if keep[i] && keep[j] {
                    lo = lo.max(gap);
                }
            }
        }
        local.push(lo);
        global.push(gl);
    }
    Ok(ConvergenceReport {
        local,
        global,
        excluded_sources: keep.iter().filter(|&&k| !k).count(),
    })
}

/// Columns `k, local_gap, global_gap`.
pub fn write_convergence_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "local_gap", "global_gap"])?;
    for (k, (lo, gl)) in report.local.iter().zip(&report.global).enumerate() {
        w.write_record([(k + 1).to_string(), format!("{lo:e}"), format!("{gl:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `source_i, source_j, distance` for every ordered source pair.
pub fn write_distance_csv(path: &Path, rows: &DistanceRows) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["source_i", "source_j", "distance"])?;
    let d = rows.source_matrix();
    let k = rows.sources.len();
    for i in 0..k {
        for j in 0..k {
            w.write_record([
                rows.sources[i].to_string(),
                rows.sources[j].to_string(),
                format!("{:e}", d[i * k + j]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(scale: f64, bump: f64) -> DistanceRows {
        // Three sources on a line at 0, 1, 2 (vertex ids 0, 1, 2).
        let base = [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]];
        let mut r: Vec<Vec<f64>> = base.iter().map(|row| row.iter().map(|x| scale * x).collect()).collect();
        r[0][2] += bump;
        r[2][0] += bump;
        DistanceRows {
            sources: vec![0, 1, 2],
            rows: r,
        }
    }

    #[test]
    fn gaps_respect_exclusion() {
        let reference = rows(1.0, 0.0);
        let fam = vec![rows(1.5, 0.0), rows(1.0, 0.25)];
        let rep = uniform_convergence_report(&fam, &reference, &[2]).unwrap();
        assert_eq!(rep.global, vec![1.0, 0.25]);
        assert_eq!(rep.local, vec![0.5, 0.0]);
        assert_eq!(rep.excluded_sources, 1);
        let mut other = rows(1.0, 0.0);
        other.sources = vec![0, 1, 3];
        assert!(uniform_convergence_report(&[other], &reference, &[]).is_err());
    }

    #[test]
    fn csv_output() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let rep = uniform_convergence_report(&[rows(2.0, 0.0)], &rows(1.0, 0.0), &[]).unwrap();
        write_convergence_csv(&p, &rep).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "k,local_gap,global_gap\n1,2e0,2e0\n");
        write_distance_csv(&p, &rows(1.0, 0.0)).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 10);
    }
}
