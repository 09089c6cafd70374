//! Scenario configuration: one TOML document per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bubble::RealBubbleFloors;
use crate::conformal::ThresholdConfig;
use crate::error::{Error, Result};
use crate::grid::{MeshDescriptor, Topology};
use crate::metric::PathStencil;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Number of family members `K`.
    pub family_len: usize,
    /// Rescale every member to unit volume.
    #[serde(default = "yes")]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub mesh: MeshDescriptor,
    pub family: FamilySpec,
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub checks: CheckTolerances,
}

fn yes() -> bool {
    true
}

/// Family generators. Schedules are geometric: `x_k = start * ratio^(k-1)`
/// for `k = 1..K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `u_k = u (1 + amplitude 2^-k sin(x0 + x_{n-1}))` with
    /// `u = exp(a sin x0 + b cos x1)` in angle coordinates of the torus.
    SmoothConvergent {
        #[serde(default = "default_a")]
        a: f64,
        #[serde(default = "default_b")]
        b: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// A constant background plus one stereographic bubble.
    SingleBubble {
        center: Vec<f64>,
        lambda_start: f64,
        lambda_ratio: f64,
        background_start: f64,
        background_ratio: f64,
    },
    /// A constant background plus bubbles at several centers sharing one
    /// `λ` schedule.
    TwoBubble {
        centers: Vec<Vec<f64>>,
        lambda_start: f64,
        lambda_ratio: f64,
        background_start: f64,
        background_ratio: f64,
    },
    /// `u = δ + (1 - δ) Σ cos²(π d / 2ρ)` over lobes of radius `ρ`; the
    /// neck value `δ` follows the schedule.
    Dumbbell {
        lobes: Vec<Vec<f64>>,
        lobe_radius: f64,
        neck_start: f64,
        neck_ratio: f64,
    },
    /// `v_k = amplitude e^{sign t} (1 + noise 2^-k ξ)` on the cylinder, with
    /// `ξ` uniform in `[-1, 1]` per vertex from the seed.
    CylinderExact {
        sign: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        noise: f64,
    },
}

fn default_a() -> f64 {
    0.3
}

fn default_b() -> f64 {
    0.2
}

fn default_amplitude() -> f64 {
    0.1
}

fn one() -> f64 {
    1.0
}

impl FamilySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilySpec::SmoothConvergent { .. } => "smooth_convergent",
            FamilySpec::SingleBubble { .. } => "single_bubble",
            FamilySpec::TwoBubble { .. } => "two_bubble",
            FamilySpec::Dumbbell { .. } => "dumbbell",
            FamilySpec::CylinderExact { .. } => "cylinder_exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Farthest-point landmarks for distance comparison.
    pub landmarks: usize,
    /// Concentration radii; `None` is 8 log-spaced values in `[2h, 8h]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Every `center_stride`-th lattice point is a scan center.
    pub center_stride: usize,
    /// Eigenvalues per member; 0 skips the spectrum.
    pub spectrum_count: usize,
    /// Relative residual required of each eigenpair.
    pub spectrum_tolerance: f64,
    /// Spectrum and distances use every `analysis_stride`-th lattice point.
    pub analysis_stride: usize,
    /// Neck diameters use every `neck_stride`-th lattice point. Necks are
    /// thin shells, so this defaults to the base mesh.
    pub neck_stride: usize,
    pub stencil: PathStencil,
    /// Fixed neck annulus around each bubble point, in base distance.
    pub neck_inner: f64,
    pub neck_outer: f64,
    pub neck_landmarks: usize,
    /// Base radius of the excluded balls around bubble points.
    pub exclusion_radius: f64,
    /// Background floor on `min u_k Vol0^{(n-2)/2n}` outside the excluded
    /// region (scale-free).
    pub background_floor: f64,
    /// Pinch ramp for dumbbells: `t` defaults to the lobe radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinch_t: Option<f64>,
    pub pinch_inner: f64,
    pub pinch_outer: f64,
    pub pinch_v1: f64,
    pub floors: RealBubbleFloors,
    /// Chart for rescaled bubbles; `None` is a ball of cutoff 2 with 16
    /// divisions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup_target: Option<MeshDescriptor>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            landmarks: 64,
            radii: None,
            center_stride: 4,
            spectrum_count: 4,
            spectrum_tolerance: 1e-6,
            analysis_stride: 1,
            neck_stride: 1,
            stencil: PathStencil::default(),
            neck_inner: 0.6,
            neck_outer: 0.95,
            neck_landmarks: 8,
            exclusion_radius: 0.2,
            background_floor: 0.25,
            pinch_t: None,
            pinch_inner: 1.0,
            pinch_outer: 1.6,
            pinch_v1: 0.5,
            floors: RealBubbleFloors::default(),
            blowup_target: None,
        }
    }
}

/// Tolerances of the asserted checks; each check records the one it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckTolerances {
    /// Final GH upper bound over the reference diameter.
    pub gh_relative: f64,
    /// Final distance gap over the construction gap.
    pub gap_factor: f64,
    /// Neck volume and diameter reduction from `k = 2` to `k = K`.
    pub neck_reduction: f64,
    /// Tail `a1/sqrt(a0)` against `Y/6`, relative.
    pub tail_ratio: f64,
    /// Spread of `a1/sqrt(a0)` around its `k = 1` value, relative.
    pub heat_ratio_band: f64,
    /// Final `λ1` over initial `λ1`.
    pub lambda1_drop: f64,
    /// Slack on `pinch quotient >= λ1`, relative.
    pub pinch_slack: f64,
    /// Volume normalization.
    pub volume: f64,
}

impl Default for CheckTolerances {
    fn default() -> Self {
        CheckTolerances {
            gh_relative: 0.02,
            gap_factor: 2.0,
            neck_reduction: 4.0,
            tail_ratio: 0.04,
            heat_ratio_band: 0.10,
            lambda1_drop: 0.1,
            pinch_slack: 1e-6,
            volume: 1e-6,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn ratio(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")))
    }
}

fn point(name: &str, p: &[f64], dim: usize) -> Result<()> {
    if p.len() != dim || p.iter().any(|c| !c.is_finite()) {
        return Err(Error::Config(format!("{name} must have {dim} finite coordinates, got {p:?}")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn dim(&self) -> usize {
        match self.mesh {
            MeshDescriptor::Torus { dim, .. } | MeshDescriptor::StereoBall { dim, .. } => dim,
            MeshDescriptor::CylinderS3 { .. } => 4,
        }
    }

    pub fn topology(&self) -> Topology {
        match self.mesh {
            MeshDescriptor::Torus { .. } => Topology::Torus,
            MeshDescriptor::StereoBall { .. } => Topology::StereoBall,
            MeshDescriptor::CylinderS3 { .. } => Topology::CylinderS3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.family_len < 4 {
            return Err(Error::Config(format!("family_len must be at least 4, got {}", self.family_len)));
        }
        self.thresholds.validate()?;
        let n = self.dim();
        let topo = self.topology();
        let need = |want: Topology| -> Result<()> {
            if topo == want {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{} families need a {} mesh, got {}",
                    self.family.kind(),
                    want.name(),
                    topo.name()
                )))
            }
        };
        match &self.family {
            FamilySpec::SmoothConvergent { a, b, amplitude } => {
                need(Topology::Torus)?;
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::Config("a and b must be finite".into()));
                }
                ratio("amplitude", *amplitude)?;
            }
            FamilySpec::SingleBubble {
                center,
                lambda_start,
                lambda_ratio,
                background_start,
                background_ratio,
            } => {
                need(Topology::StereoBall)?;
                point("center", center, n)?;
                positive("lambda_start", *lambda_start)?;
                ratio("lambda_ratio", *lambda_ratio)?;
                positive("background_start", *background_start)?;
                ratio("background_ratio", *background_ratio)?;
            }
            FamilySpec::TwoBubble {
                centers,
                lambda_start,
                lambda_ratio,
                background_start,
                background_ratio,
            } => {
                need(Topology::StereoBall)?;
                if centers.len() < 2 {
                    return Err(Error::Config("two_bubble needs at least two centers".into()));
                }
                for c in centers {
                    point("center", c, n)?;
                }
                positive("lambda_start", *lambda_start)?;
                ratio("lambda_ratio", *lambda_ratio)?;
                positive("background_start", *background_start)?;
                ratio("background_ratio", *background_ratio)?;
            }
            FamilySpec::Dumbbell {
                lobes,
                lobe_radius,
                neck_start,
                neck_ratio,
            } => {
                need(Topology::Torus)?;
                if lobes.len() != 2 {
                    return Err(Error::Config(format!("dumbbell needs two lobes, got {}", lobes.len())));
                }
                for c in lobes {
                    point("lobe", c, n)?;
                }
                positive("lobe_radius", *lobe_radius)?;
                ratio("neck_start", *neck_start)?;
                ratio("neck_ratio", *neck_ratio)?;
            }
            FamilySpec::CylinderExact { sign, amplitude, noise } => {
                need(Topology::CylinderS3)?;
                if sign.abs() != 1.0 {
                    return Err(Error::Config(format!("sign must be +1 or -1, got {sign}")));
                }
                positive("amplitude", *amplitude)?;
                if !(*noise >= 0.0 && *noise < 1.0) {
                    return Err(Error::Config(format!("noise must lie in [0, 1), got {noise}")));
                }
                if let MeshDescriptor::CylinderS3 { band_length, .. } = self.mesh {
                    if (band_length - self.thresholds.band_l).abs() > 1e-12 * band_length {
                        return Err(Error::Config(format!(
                            "cylinder band_length {band_length} differs from thresholds.band_l {}",
                            self.thresholds.band_l
                        )));
                    }
                }
            }
        }
        let a = &self.analysis;
        if a.center_stride == 0 || a.analysis_stride == 0 || a.neck_stride == 0 || a.neck_landmarks == 0 {
            return Err(Error::Config("strides and landmark counts must be positive".into()));
        }
        if a.spectrum_count == 1 {
            return Err(Error::Config("spectrum_count must be 0 or at least 2".into()));
        }
        if topo == Topology::CylinderS3 && a.analysis_stride != 1 {
            return Err(Error::Config("cylinder meshes cannot be coarsened".into()));
        }
        if let Some(r) = &a.radii {
            if r.is_empty() || !(r[0] > 0.0) || r.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Config("radii must be positive and strictly increasing".into()));
            }
        }
        if !(a.neck_inner >= 0.0 && a.neck_inner < a.neck_outer) {
            return Err(Error::Config(format!(
                "need 0 <= neck_inner < neck_outer, got {} and {}",
                a.neck_inner, a.neck_outer
            )));
        }
        positive("spectrum_tolerance", a.spectrum_tolerance)?;
        positive("exclusion_radius", a.exclusion_radius)?;
        positive("background_floor", a.background_floor)?;
        if let Some(t) = a.pinch_t {
            positive("pinch_t", t)?;
        }
        if !(a.pinch_inner > 0.0 && a.pinch_outer > a.pinch_inner) {
            return Err(Error::Config("need 0 < pinch_inner < pinch_outer".into()));
        }
        ratio("pinch_v1", a.pinch_v1)?;
        positive("floors.min_floor", a.floors.min_floor)?;
        positive("floors.volume_floor", a.floors.volume_floor)?;
        if let Some(t) = &a.blowup_target {
            if !matches!(t, MeshDescriptor::StereoBall { dim, .. } if *dim == n) {
                return Err(Error::Config(format!("blowup_target must be a {n}-dimensional stereo_ball")));
            }
        }
        let c = &self.checks;
        for (name, v) in [
            ("checks.gh_relative", c.gh_relative),
            ("checks.gap_factor", c.gap_factor),
            ("checks.neck_reduction", c.neck_reduction),
            ("checks.tail_ratio", c.tail_ratio),
            ("checks.heat_ratio_band", c.heat_ratio_band),
            ("checks.lambda1_drop", c.lambda1_drop),
            ("checks.pinch_slack", c.pinch_slack),
            ("checks.volume", c.volume),
        ] {
            positive(name, v)?;
        }
        Ok(())
    }

    /// The rescaling chart used for blowups.
    pub fn blowup_target(&self) -> MeshDescriptor {
        self.analysis.blowup_target.clone().unwrap_or(MeshDescriptor::StereoBall {
            dim: self.dim(),
            cutoff: 2.0,
            divisions: 16,
            vertex_budget: crate::grid::DEFAULT_VERTEX_BUDGET,
        })
    }
}
