//! Bubble report: a TOML document plus a CSV of the concentration profile.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{BlowupSequence, ConcentrationProfile, NeckStats, PairClass, TailWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub first: usize,
    pub second: usize,
    pub class: PairClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeckEntry {
    /// Index into `bubble_points`.
    pub bubble: usize,
    pub k: usize,
    pub r_inner: f64,
    pub r_outer: f64,
    #[serde(flatten)]
    pub stats: NeckStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleReport {
    pub bubble_points: Vec<usize>,
    pub tail: TailWindow,
    pub eps_detect: f64,
    pub sequences: Vec<BlowupSequence>,
    pub pair_classification: Vec<PairEntry>,
    pub neck_stats: Vec<NeckEntry>,
    /// Per sequence: whether the rescaled tail has a nonzero limit.
    pub limit_nonzero: Vec<bool>,
}

impl BubbleReport {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }
}

/// One row per `(k, center, radius)`: `k, center, radius, energy`.
pub fn write_concentration_csv(path: &Path, profile: &ConcentrationProfile) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "center", "radius", "energy"])?;
    for k in 0..profile.family_len {
        for (c, &center) in profile.centers.iter().enumerate() {
            for (r, &radius) in profile.radii.iter().enumerate() {
                w.write_record([
                    (k + 1).to_string(),
                    center.to_string(),
                    format!("{radius:e}"),
                    format!("{:e}", profile.get(k, c, r)),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
