//! Family generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{FamilySpec, ScenarioConfig};
use crate::conformal::profiles::bubble_value;
use crate::conformal::{normalize_volume, upow, ConformalField, Exponents};
use crate::error::{Error, Result};
use crate::grid::{build_cylinder_span, BandDecomposition, GridManifold, MeshDescriptor};

/// A generated family on its mesh.
#[derive(Debug, Clone)]
pub struct Family {
    pub fields: Vec<ConformalField>,
    /// Normalization constants `c_k` (1 for raw families).
    pub scales: Vec<f64>,
    /// The limit field of a smooth family, normalized like the members.
    pub reference: Option<ConformalField>,
}

/// Build the base mesh, with its band decomposition on cylinders.
pub fn build_mesh(config: &ScenarioConfig) -> Result<(GridManifold, Option<BandDecomposition>)> {
    match config.mesh {
        MeshDescriptor::CylinderS3 {
            t_start,
            band_length,
            num_bands,
            t_divisions_per_band,
            s3_resolution,
        } => {
            let (m, b) = build_cylinder_span(t_start, band_length, num_bands, t_divisions_per_band, s3_resolution)?;
            Ok((m, Some(b)))
        }
        ref d => Ok((d.build()?, None)),
    }
}

/// `start * ratio^(k-1)` for `k = 1..=len`.
pub fn geometric_schedule(start: f64, ratio: f64, len: usize) -> Vec<f64> {
    (0..len).map(|i| start * ratio.powi(i as i32)).collect()
}

fn torus_side(m: &GridManifold) -> Result<f64> {
    match *m.descriptor() {
        MeshDescriptor::Torus { side, .. } => Ok(side),
        _ => Err(Error::Config("family needs a torus mesh".into())),
    }
}

/// Minimum-image displacement on a torus of the given side.
fn wrap(d: f64, side: f64) -> f64 {
    d - side * (d / side).round()
}

fn check_in_chart(m: &GridManifold, center: &[f64], lambda: f64) -> Result<()> {
    let MeshDescriptor::StereoBall { cutoff, .. } = *m.descriptor() else {
        return Err(Error::Config("bubble families need a stereo_ball mesh".into()));
    };
    let r = center.iter().map(|c| c * c).sum::<f64>().sqrt();
    // The bubble keeps most of its energy within a few λ of its center.
    if r + lambda >= cutoff {
        return Err(Error::OutsideChart(format!(
            "bubble at {center:?} with λ = {lambda} leaves the chart of cutoff {cutoff}"
        )));
    }
    Ok(())
}

/// The raw (unnormalized) members of the configured family.
pub fn raw_family(config: &ScenarioConfig, m: &GridManifold) -> Result<(Vec<ConformalField>, Option<ConformalField>)> {
    let n = m.dim();
    let len = config.family_len;
    match &config.family {
        FamilySpec::SmoothConvergent { a, b, amplitude } => {
            let side = torus_side(m)?;
            let s = 2.0 * PI / side;
            let base = |x: &[f64]| (a * (s * x[0]).sin() + b * (s * x[1]).cos()).exp();
            let reference = ConformalField::from_fn(m, base)?;
            let fields = (1..=len)
                .map(|k| {
                    let e = amplitude * 0.5f64.powi(k as i32);
                    ConformalField::from_fn(m, |x| base(x) * (1.0 + e * (s * (x[0] + x[n - 1])).sin()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((fields, Some(reference)))
        }
        FamilySpec::SingleBubble {
            center,
            lambda_start,
            lambda_ratio,
            background_start,
            background_ratio,
        } => bubbles(
            m,
            std::slice::from_ref(center),
            &geometric_schedule(*lambda_start, *lambda_ratio, len),
            &geometric_schedule(*background_start, *background_ratio, len),
        ),
        FamilySpec::TwoBubble {
            centers,
            lambda_start,
            lambda_ratio,
            background_start,
            background_ratio,
        } => bubbles(
            m,
            centers,
            &geometric_schedule(*lambda_start, *lambda_ratio, len),
            &geometric_schedule(*background_start, *background_ratio, len),
        ),
        FamilySpec::Dumbbell {
            lobes,
            lobe_radius,
            neck_start,
            neck_ratio,
        } => {
            let side = torus_side(m)?;
            if 2.0 * lobe_radius > side {
                return Err(Error::Config(format!("lobe radius {lobe_radius} does not fit the torus")));
            }
            let bump = |x: &[f64], c: &[f64]| {
                let d = x.iter().zip(c).map(|(x, c)| wrap(x - c, side).powi(2)).sum::<f64>().sqrt();
                if d < *lobe_radius {
                    (PI * d / (2.0 * lobe_radius)).cos().powi(2)
                } else {
                    0.0
                }
            };
            let fields = geometric_schedule(*neck_start, *neck_ratio, len)
                .into_iter()
                .map(|delta| {
                    ConformalField::from_fn(m, |x| {
                        let b: f64 = lobes.iter().map(|c| bump(x, c)).sum();
                        delta + (1.0 - delta) * b.min(1.0)
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((fields, None))
        }
        FamilySpec::CylinderExact { sign, amplitude, noise } => {
            let mut fields = Vec::with_capacity(len);
            for k in 1..=len {
                // One stream per member so members do not depend on each other.
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(k as u64));
                let e = noise * 0.5f64.powi(k as i32);
                let vals = (0..m.len())
                    .map(|v| {
                        let xi: f64 = rng.gen_range(-1.0..=1.0);
                        amplitude * (sign * m.coords(v)[0]).exp() * (1.0 + e * xi)
                    })
                    .collect();
                fields.push(ConformalField::new(m, vals)?);
            }
            Ok((fields, None))
        }
    }
}

fn bubbles(
    m: &GridManifold,
    centers: &[Vec<f64>],
    lambdas: &[f64],
    background: &[f64],
) -> Result<(Vec<ConformalField>, Option<ConformalField>)> {
    let n = m.dim();
    for c in centers {
        check_in_chart(m, c, lambdas[0])?;
    }
    let fields = lambdas
        .iter()
        .zip(background)
        .map(|(&l, &b)| ConformalField::from_fn(m, |x| b + centers.iter().map(|c| bubble_value(n, x, c, l)).sum::<f64>()))
        .collect::<Result<Vec<_>>>()?;
    Ok((fields, None))
}

/// `Vol(M, u^{4/(n-2)} g0)`.
pub fn field_volume(m: &GridManifold, u: &ConformalField) -> f64 {
    let e = Exponents::for_dim(m.dim()).volume;
    u.values().iter().zip(m.vertex_volume()).map(|(&u, &w)| upow(u, e) * w).sum()
}

/// Generate the configured family, volume-normalized unless the config asks
/// for raw fields.
pub fn gen_family(config: &ScenarioConfig, m: &GridManifold) -> Result<Family> {
    let (raw, reference) = raw_family(config, m)?;
    if !config.normalize {
        return Ok(Family {
            scales: vec![1.0; raw.len()],
            fields: raw,
            reference,
        });
    }
    let mut fields = Vec::with_capacity(raw.len());
    let mut scales = Vec::with_capacity(raw.len());
    for u in &raw {
        let (f, c) = normalize_volume(m, u)?;
        fields.push(f);
        scales.push(c);
    }
    let reference = reference.map(|r| normalize_volume(m, &r).map(|(f, _)| f)).transpose()?;
    Ok(Family {
        fields,
        scales,
        reference,
    })
}
