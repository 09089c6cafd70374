//! Run reports: TOML document, CSV tables, `.dat` series and a text summary.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::threshold::ThresholdReport;
use crate::bubble::{BubbleReport, DecayProfile, ThreeCirclesVerdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseClass {
    /// Background bounded away from zero and no real bubble.
    Case1,
    /// Background tending to zero and exactly one real bubble.
    Case2,
    Undetermined,
}

impl CaseClass {
    pub fn label(self) -> &'static str {
        match self {
            CaseClass::Case1 => "case 1 (smooth limit)",
            CaseClass::Case2 => "case 2 (single bubble)",
            CaseClass::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }

    pub fn holds(self, value: f64, tolerance: f64) -> bool {
        match self {
            Relation::Lt => value < tolerance,
            Relation::Le => value <= tolerance,
            Relation::Ge => value >= tolerance,
            Relation::Eq => value == tolerance,
        }
    }
}

/// One asserted property: `value relation tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, value: f64, relation: Relation, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            value,
            relation,
            tolerance,
            pass: relation.holds(value, tolerance),
            detail: detail.into(),
        }
    }

    /// A yes/no property recorded as `value == 1`.
    pub fn flag(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Check::new(name, if ok { 1.0 } else { 0.0 }, Relation::Eq, 1.0, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PerK {
    pub k: usize,
    /// Normalization constant applied to the raw member.
    pub scale: f64,
    pub volume: f64,
    pub a0: f64,
    pub a1: f64,
    pub heat_ratio: f64,
    pub curvature_energy: f64,
    /// `min u_k Vol0^{(n-2)/2n}` outside the excluded region.
    pub background: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gh_upper: Option<f64>,
    /// Neck of the first bubble point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neck_volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neck_diameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinch_quotient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub three_circles: Option<ThreeCirclesVerdict>,
}

/// What one blowup sequence in the bubble report was extracted from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceInfo {
    /// Index into the bubble points.
    pub bubble: usize,
    /// Curvature-energy level defining the scales.
    pub level: f64,
    /// Relative gap of `∫R²dV` on `B_r` against the rescaled `B_1`, at `k = K`.
    pub energy_gap: f64,
    /// Tail minima of `min_{B_1} v` and `∫_{B_1} v^{2n/(n-2)}`, compared
    /// against the real-bubble floors.
    pub tail_min: f64,
    pub tail_volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub name: String,
    pub kind: String,
    pub seed: u64,
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
    pub family_len: usize,
    pub dim: usize,
    pub vertices: usize,
    pub analysis_vertices: usize,
    pub case: CaseClass,
    pub background_floor: f64,
    pub real_bubbles: usize,
    /// Concentration radii used by the scan.
    pub radii: Vec<f64>,
    /// Landmarks of the distance comparison (analysis-mesh vertex ids).
    pub landmarks: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_diameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdReport>,
    pub per_k: Vec<PerK>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bubbles: Option<BubbleReport>,
    pub sequence_info: Vec<SequenceInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayProfile>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.complete && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Plain-text summary.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario {} ({}), K = {}, n = {}", self.name, self.kind, self.family_len, self.dim);
        let _ = writeln!(
            s,
            "mesh: {} vertices, analysis mesh: {} vertices, seed {}",
            self.vertices, self.analysis_vertices, self.seed
        );
        if !self.complete {
            let _ = writeln!(
                s,
                "INCOMPLETE: stage `{}` failed",
                self.failed_stage.as_deref().unwrap_or("?")
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:>3} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "k", "a1/sqrt(a0)", "lambda1", "local_gap", "gh_upper", "neck_vol", "neck_diam", "background"
        );
        let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"));
        for p in &self.per_k {
            let _ = writeln!(
                s,
                "{:>3} {:>12.6} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12.6}",
                p.k,
                p.heat_ratio,
                opt(p.lambda1),
                opt(p.local_gap),
                opt(p.gh_upper),
                opt(p.neck_volume),
                opt(p.neck_diameter),
                p.background
            );
        }
        if let Some(t) = &self.thresholds {
            let _ = writeln!(s);
            let _ = writeln!(s, "tail liminf a1/sqrt(a0) = {:.6} over k in [{}, {}]", t.tail_liminf, t.tail.start + 1, t.tail.end);
            let _ = writeln!(
                s,
                "  vs Y(S^{}) = {:.4}: ratio {:.4} ({})",
                t.dim,
                t.yamabe,
                t.relative_to_yamabe,
                if t.below_yamabe { "below" } else { "not below" }
            );
            let _ = writeln!(
                s,
                "  vs Y(S^{})/6 = {:.4}: ratio {:.4} ({})",
                t.dim,
                t.yamabe_over_6,
                t.relative_to_yamabe_over_6,
                if t.below_yamabe_over_6 { "below" } else { "not below" }
            );
        }
        if let Some(b) = &self.bubbles {
            let _ = writeln!(s);
            let _ = writeln!(s, "bubble points: {:?} (real: {})", b.bubble_points, self.real_bubbles);
            for (i, q) in self.sequence_info.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "  sequence {i}: bubble {} level {:.3} tail min_B1 v {:.4} vol_B1 {:.4} energy gap {:.4} nonzero limit {}",
                    q.bubble,
                    q.level,
                    q.tail_min,
                    q.tail_volume,
                    q.energy_gap,
                    b.limit_nonzero.get(i).copied().unwrap_or(false)
                );
            }
            for p in &b.pair_classification {
                let _ = writeln!(s, "  sequences {} and {}: {:?}", p.first, p.second, p.class);
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "classification: {}", self.case.label());
        let _ = writeln!(s);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {}: {:.6e} {} {:.6e}  {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.relation.symbol(),
                c.tolerance,
                c.detail
            );
        }
        s
    }
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:e}"))
}

/// Columns of `per_k.csv`.
pub const PER_K_COLUMNS: [&str; 16] = [
    "k",
    "scale",
    "volume",
    "a0",
    "a1",
    "heat_ratio",
    "curvature_energy",
    "background",
    "lambda1",
    "local_gap",
    "global_gap",
    "construction_gap",
    "gh_upper",
    "neck_volume",
    "neck_diameter",
    "pinch_quotient",
];

pub fn write_per_k_csv(path: &Path, report: &RunReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(PER_K_COLUMNS)?;
    for p in &report.per_k {
        w.write_record([
            p.k.to_string(),
            format!("{:e}", p.scale),
            format!("{:e}", p.volume),
            format!("{:e}", p.a0),
            format!("{:e}", p.a1),
            format!("{:e}", p.heat_ratio),
            format!("{:e}", p.curvature_energy),
            format!("{:e}", p.background),
            cell(p.lambda1),
            cell(p.local_gap),
            cell(p.global_gap),
            cell(p.construction_gap),
            cell(p.gh_upper),
            cell(p.neck_volume),
            cell(p.neck_diameter),
            cell(p.pinch_quotient),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_checks_csv(path: &Path, report: &RunReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["name", "value", "relation", "tolerance", "pass"])?;
    for c in &report.checks {
        w.write_record([
            c.name.clone(),
            format!("{:e}", c.value),
            c.relation.symbol().to_string(),
            format!("{:e}", c.tolerance),
            c.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `k value` file; rows without a value are skipped.
pub fn write_dat(path: &Path, series: &[(usize, Option<f64>)]) -> Result<()> {
    let mut s = String::new();
    for &(k, v) in series {
        if let Some(v) = v {
            let _ = writeln!(s, "{k} {v:e}");
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// The `.dat` series of a report, by file stem.
pub fn dat_series(report: &RunReport) -> Vec<(&'static str, Vec<(usize, Option<f64>)>)> {
    let col = |f: &dyn Fn(&PerK) -> Option<f64>| report.per_k.iter().map(|p| (p.k, f(p))).collect::<Vec<_>>();
    let mut out = vec![
        ("heat_ratio", col(&|p| Some(p.heat_ratio))),
        ("background", col(&|p| Some(p.background))),
    ];
    let optional: [(&'static str, &dyn Fn(&PerK) -> Option<f64>); 6] = [
        ("lambda1", &|p| p.lambda1),
        ("distance_gap", &|p| p.local_gap),
        ("gh_upper", &|p| p.gh_upper),
        ("neck_volume", &|p| p.neck_volume),
        ("neck_diameter", &|p| p.neck_diameter),
        ("pinch_quotient", &|p| p.pinch_quotient),
    ];
    for (name, f) in optional {
        let s = col(f);
        if s.iter().any(|(_, v)| v.is_some()) {
            out.push((name, s));
        }
    }
    out
}
