//! End-to-end scenario runs.

use std::path::Path;

use rayon::prelude::*;

use super::config::{FamilySpec, ScenarioConfig, SCHEMA_VERSION};
use super::family::{build_mesh, field_volume, gen_family, Family};
use super::report::{
    dat_series, write_checks_csv, write_dat, write_per_k_csv, CaseClass, Check, PerK, Relation, RunReport, SequenceInfo,
};
use super::threshold::threshold_check;
use crate::bubble::{
    annulus, blowup_energy_check, blowup_rescale, classify_pair, concentration_scan, energy_density,
    first_concentration_scale_among, is_real_bubble, neck_stats, unit_ball_stats, singularity_decay_profile, three_circles_check,
    write_concentration_csv, BlowupSequence, BubbleReport, ConcentrationProfile, NeckEntry, NeckStats, PairClass,
    PairEntry, TailWindow,
};
use crate::conformal::{upow, ConformalField, Exponents};
use crate::error::{Error, Result};
use crate::grid::{ball_vertices, BandDecomposition, GridManifold, MeshDescriptor};
use crate::metric::{
    conformal_distances, farthest_point_landmarks, gh_upper_shared, uniform_convergence_report, write_convergence_csv,
    ConvergenceReport,
};
use crate::spectral::{laplace_spectrum, pinch_test_with_ramp, SolverOptions};

/// Tables that go to disk but not into the report document.
#[derive(Default)]
struct Artifacts {
    concentration: Option<ConcentrationProfile>,
    convergence: Option<ConvergenceReport>,
}

/// Run the configured scenario and, when `output_dir` is set, write the
/// report and tables there. A failing stage still writes a report marked
/// incomplete before its error is returned.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let mut report = empty_report(config);
    let mut art = Artifacts::default();
    let outcome = pipeline(config, &mut report, &mut art);
    match &outcome {
        Ok(()) => report.complete = true,
        Err(Error::Stage { stage, .. }) => report.failed_stage = Some(stage.to_string()),
        Err(_) => report.failed_stage = Some("unknown".into()),
    }
    if let Some(dir) = &config.output_dir {
        write_outputs(dir, config, &report, &art)?;
    }
    outcome.map(|()| report)
}

fn empty_report(config: &ScenarioConfig) -> RunReport {
    RunReport {
        schema_version: SCHEMA_VERSION,
        name: config.name.clone(),
        kind: config.family.kind().into(),
        seed: config.seed,
        complete: false,
        failed_stage: None,
        family_len: config.family_len,
        dim: config.dim(),
        vertices: 0,
        analysis_vertices: 0,
        case: CaseClass::Undetermined,
        background_floor: config.analysis.background_floor,
        real_bubbles: 0,
        radii: Vec::new(),
        landmarks: Vec::new(),
        reference_diameter: None,
        thresholds: None,
        per_k: Vec::new(),
        bubbles: None,
        sequence_info: Vec::new(),
        decay: None,
        checks: Vec::new(),
    }
}

/// Vertices whose lattice indices are all multiples of `stride`.
fn strided_vertices(m: &GridManifold, stride: usize) -> Vec<usize> {
    (0..m.len())
        .filter(|&v| m.lattice_index(v).iter().all(|i| i % stride == 0))
        .collect()
}

/// Concentration-scan centers: the lattice points whose indices are all
/// multiples of `stride`, plus the energy-density maximizer of every member.
pub fn scan_centers(m: &GridManifold, fields: &[ConformalField], stride: usize) -> Result<Vec<usize>> {
    let mut centers = strided_vertices(m, stride);
    for u in fields {
        centers.push(argmax(&energy_density(m, u)?));
    }
    centers.sort_unstable();
    centers.dedup();
    Ok(centers)
}

/// 8 log-spaced radii from `2h` to `8h`.
pub fn default_radii(m: &GridManifold) -> Vec<f64> {
    let h = m.spacing()[0];
    (0..8).map(|i| 2.0 * h * 4f64.powf(i as f64 / 7.0)).collect()
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Largest ratio of consecutive values (`< 1` means strictly decreasing).
fn max_step_ratio(xs: &[Option<f64>]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for w in xs.windows(2) {
        let r = match (w[0], w[1]) {
            (Some(a), Some(b)) if a > 0.0 => b / a,
            _ => f64::NAN,
        };
        if r.is_nan() {
            return f64::NAN;
        }
        worst = worst.max(r);
    }
    worst
}

fn pipeline(cfg: &ScenarioConfig, rep: &mut RunReport, art: &mut Artifacts) -> Result<()> {
    let an = &cfg.analysis;
    let n = cfg.dim();
    let (m, bands) = build_mesh(cfg).map_err(Error::stage("mesh"))?;
    rep.vertices = m.len();
    let fam = gen_family(cfg, &m).map_err(Error::stage("family"))?;
    let len = fam.fields.len();
    rep.per_k = fam
        .fields
        .iter()
        .enumerate()
        .map(|(i, u)| PerK {
            k: i + 1,
            scale: fam.scales[i],
            volume: field_volume(&m, u),
            ..Default::default()
        })
        .collect();

    let (inv, thr) = threshold_check(&m, &fam.fields).map_err(Error::stage("invariants"))?;
    for (p, h) in rep.per_k.iter_mut().zip(&inv) {
        p.a0 = h.a0;
        p.a1 = h.a1;
        p.heat_ratio = h.a1_over_sqrt_a0();
        p.curvature_energy = h.r2_integral;
    }
    rep.thresholds = Some(thr);

    // Analysis mesh: every `analysis_stride`-th lattice point of the base mesh.
    let coarse = if an.analysis_stride > 1 {
        Some(m.coarsen(an.analysis_stride).map_err(Error::stage("analysis mesh"))?)
    } else {
        None
    };
    let am: &GridManifold = coarse.as_ref().map_or(&m, |c| &c.0);
    let restrict = |u: &ConformalField| -> Result<ConformalField> {
        match &coarse {
            None => Ok(u.clone()),
            Some((c, map)) => ConformalField::new(c, map.iter().map(|&v| u.values()[v]).collect()),
        }
    };
    let afields = fam
        .fields
        .iter()
        .map(restrict)
        .collect::<Result<Vec<_>>>()
        .map_err(Error::stage("analysis mesh"))?;
    rep.analysis_vertices = am.len();

    if an.spectrum_count > 0 {
        let opts = SolverOptions {
            seed: cfg.seed,
            tolerance: an.spectrum_tolerance,
            ..Default::default()
        };
        let l1 = afields
            .par_iter()
            .map(|u| laplace_spectrum(am, u, an.spectrum_count, &opts).map(|s| s.lambda1))
            .collect::<Result<Vec<_>>>()
            .map_err(Error::stage("spectrum"))?;
        for (p, l) in rep.per_k.iter_mut().zip(l1) {
            p.lambda1 = l;
        }
    }

    // The dumbbell concentrates curvature on its neck seam, which is not a
    // bubble; its analysis is spectral only.
    let scan_bubbles = m.topology().is_flat() && !matches!(cfg.family, FamilySpec::Dumbbell { .. });
    let mut bubble_points = Vec::new();
    if scan_bubbles {
        let radii = an.radii.clone().unwrap_or_else(|| default_radii(&m));
        let scan = scan_centers(&m, &fam.fields, an.center_stride)
            .and_then(|centers| concentration_scan(&m, &fam.fields, &centers, &radii, cfg.thresholds.eps_detect))
        .map_err(Error::stage("concentration"))?;
        bubble_points = scan.bubble_points.clone();
        rep.radii = radii;
        art.concentration = Some(scan.profile);
    }

    // Excluded region: base balls around the bubble points.
    let mut excluded = vec![false; m.len()];
    for &p in &bubble_points {
        for v in ball_vertices(&m, p, an.exclusion_radius) {
            excluded[v] = true;
        }
    }
    let vol_factor = m.total_volume().powf((n as f64 - 2.0) / (2.0 * n as f64));
    for (p, u) in rep.per_k.iter_mut().zip(&fam.fields) {
        let min = u
            .values()
            .iter()
            .zip(&excluded)
            .filter(|(_, &e)| !e)
            .map(|(&x, _)| x)
            .fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return Err(Error::stage("background")(Error::EmptyRegion(
                "every vertex lies in the excluded region".into(),
            )));
        }
        p.background = min * vol_factor;
    }

    if let Some(reference) = &fam.reference {
        distances(cfg, rep, art, &m, am, &coarse, &afields, reference, &excluded)
            .map_err(Error::stage("distances"))?;
    }

    if !bubble_points.is_empty() {
        bubbles(cfg, rep, &m, &fam, &bubble_points).map_err(Error::stage("bubbles"))?;
    }

    if let FamilySpec::Dumbbell { lobes, lobe_radius, .. } = &cfg.family {
        (|| {
            let x = am
                .nearest_vertex(&lobes[0])
                .ok_or_else(|| Error::OutsideChart(format!("lobe {:?}", lobes[0])))?;
            let t = an.pinch_t.unwrap_or(*lobe_radius);
            for (p, u) in rep.per_k.iter_mut().zip(&afields) {
                p.pinch_quotient = Some(pinch_test_with_ramp(am, u, x, t, an.pinch_v1, an.pinch_inner, an.pinch_outer)?.quotient);
            }
            Ok(())
        })()
        .map_err(Error::stage("pinch"))?;
    }

    if let Some(bands) = &bands {
        cylinder_bands(cfg, rep, &m, bands, &fam).map_err(Error::stage("three circles"))?;
    }

    let tail = TailWindow::last_quarter(len);
    let bg: Vec<f64> = rep.per_k.iter().map(|p| p.background).collect();
    let bg_min = tail.min_of(&bg);
    let bg_max = bg[tail.start..tail.end].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    rep.case = if !scan_bubbles {
        CaseClass::Undetermined
    } else if rep.real_bubbles == 0 && bg_min >= an.background_floor {
        CaseClass::Case1
    } else if rep.real_bubbles == 1 && bg_max < an.background_floor {
        CaseClass::Case2
    } else {
        CaseClass::Undetermined
    };
    rep.checks = checks(cfg, rep);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn distances(
    cfg: &ScenarioConfig,
    rep: &mut RunReport,
    art: &mut Artifacts,
    m: &GridManifold,
    am: &GridManifold,
    coarse: &Option<(GridManifold, Vec<usize>)>,
    afields: &[ConformalField],
    reference: &ConformalField,
    excluded: &[bool],
) -> Result<()> {
    let an = &cfg.analysis;
    let n = m.dim();
    let (aref, aexcluded): (ConformalField, Vec<bool>) = match coarse {
        None => (reference.clone(), excluded.to_vec()),
        Some((c, map)) => (
            ConformalField::new(c, map.iter().map(|&v| reference.values()[v]).collect())?,
            map.iter().map(|&v| excluded[v]).collect(),
        ),
    };
    let candidates: Vec<usize> = (0..am.len()).filter(|&v| !aexcluded[v]).collect();
    let count = an.landmarks.min(candidates.len());
    let lm = farthest_point_landmarks(am, &aref, count, Some(&candidates), an.stencil)?;
    let rows = afields
        .par_iter()
        .map(|u| conformal_distances(am, u, &lm.vertices, an.stencil))
        .collect::<Result<Vec<_>>>()?;
    let excluded_ids: Vec<usize> = (0..am.len()).filter(|&v| aexcluded[v]).collect();
    let conv = uniform_convergence_report(&rows, &lm.rows, &excluded_ids)?;
    let ref_space = lm.rows.to_metric_space()?;
    let diam = ref_space.diameter();
    let ref_max = lm.rows.source_matrix().into_iter().fold(0.0, f64::max);
    let amplitude = match cfg.family {
        FamilySpec::SmoothConvergent { amplitude, .. } => Some(amplitude),
        _ => None,
    };
    for (i, p) in rep.per_k.iter_mut().enumerate() {
        p.local_gap = Some(conv.local[i]);
        p.global_gap = Some(conv.global[i]);
        p.gh_upper = Some(gh_upper_shared(&ref_space, &rows[i].to_metric_space()?)?);
        // Distances scale pointwise by at most (1 + ε_k)^{2/(n-2)}.
        p.construction_gap = amplitude.map(|a| {
            let e = a * 0.5f64.powi(i as i32 + 1);
            ((1.0 + e).powf(Exponents::for_dim(n).length) - 1.0) * ref_max
        });
    }
    rep.landmarks = lm.vertices;
    rep.reference_diameter = Some(diam);
    art.convergence = Some(conv);
    Ok(())
}

fn bubbles(
    cfg: &ScenarioConfig,
    rep: &mut RunReport,
    m: &GridManifold,
    fam: &Family,
    bubble_points: &[usize],
) -> Result<()> {
    let an = &cfg.analysis;
    let th = &cfg.thresholds;
    let len = fam.fields.len();
    let tail = TailWindow::last_quarter(len);
    let target = cfg.blowup_target().build()?;
    let r_max = *rep.radii.last().expect("radii set by the concentration stage");
    let levels = [0.5 * th.eps_detect, th.eps_detect];

    let mut sequences = Vec::new();
    let mut limit_nonzero = Vec::new();
    let mut info = Vec::new();
    for (b, &p) in bubble_points.iter().enumerate() {
        let cands = ball_vertices(m, p, r_max);
        for &level in &levels {
            let found = fam
                .fields
                .par_iter()
                .map(|u| first_concentration_scale_among(m, u, level, Some(&cands)))
                .collect::<Result<Vec<_>>>()?;
            let mut centers = Vec::with_capacity(len);
            let mut scales = Vec::with_capacity(len);
            for (k, s) in found.into_iter().enumerate() {
                let s = s.ok_or_else(|| {
                    Error::EmptyRegion(format!("no ball near bubble point {p} reaches energy {level} at k = {}", k + 1))
                })?;
                if s.radius <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "bubble at point {p} is below mesh resolution at k = {}: one vertex holds energy {level}",
                        k + 1
                    )));
                }
                centers.push(s.center);
                scales.push(s.radius);
            }
            let rescaled = (tail.start..tail.end)
                .map(|k| blowup_rescale(m, &fam.fields[k], m.coords(centers[k]), scales[k], &target))
                .collect::<Result<Vec<_>>>()?;
            let real = is_real_bubble(&target, &rescaled, &an.floors)?;
            let stats = rescaled
                .iter()
                .map(|v| unit_ball_stats(&target, v))
                .collect::<Result<Vec<_>>>()?;
            let tail_min = stats.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
            let tail_volume = stats.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
            let last = len - 1;
            let check = blowup_energy_check(
                m,
                &fam.fields[last],
                centers[last],
                scales[last],
                &target,
                rescaled.last().expect("tail is nonempty"),
                1.0,
            )?;
            sequences.push(BlowupSequence::new(centers, scales)?);
            limit_nonzero.push(real);
            info.push(SequenceInfo {
                bubble: b,
                level,
                energy_gap: check.relative_gap(),
                tail_min,
                tail_volume,
            });
        }
    }

    let mut pairs = Vec::new();
    for i in 0..sequences.len() {
        for j in i + 1..sequences.len() {
            pairs.push(PairEntry {
                first: i,
                second: j,
                class: classify_pair(m, &sequences[i], &sequences[j], th.d, th.d_prime, th.d_double_prime)?,
            });
        }
    }

    // Necks: fixed base annulus, g-volume on the base mesh, diameter on the
    // neck mesh.
    let fits = |p: usize| match (m.admissible_radius(p), m.descriptor()) {
        (Some(a), _) => an.neck_outer <= a,
        (None, MeshDescriptor::Torus { side, .. }) => an.neck_outer <= side / 2.0,
        (None, _) => false,
    };
    let ex = Exponents::for_dim(m.dim()).volume;
    let neck_mesh = if an.neck_stride > 1 { Some(m.coarsen(an.neck_stride)?) } else { None };
    let nm: &GridManifold = neck_mesh.as_ref().map_or(m, |c| &c.0);
    let mut necks = Vec::new();
    for (b, &p) in bubble_points.iter().enumerate() {
        if !fits(p) {
            continue;
        }
        let ring = annulus(m, p, an.neck_inner, an.neck_outer);
        let w = m.vertex_volume();
        let pc = nm
            .nearest_vertex(m.coords(p))
            .ok_or_else(|| Error::OutsideChart(format!("bubble point {p} has no neck-mesh vertex")))?;
        for (k, u) in fam.fields.iter().enumerate() {
            let volume = ring.iter().map(|&v| upow(u.values()[v], ex) * w[v]).sum();
            let un = match &neck_mesh {
                None => u.clone(),
                Some((c, map)) => ConformalField::new(c, map.iter().map(|&v| u.values()[v]).collect())?,
            };
            let coarse = neck_stats(nm, &un, pc, an.neck_inner, an.neck_outer, an.neck_landmarks, an.stencil)?;
            let stats = NeckStats {
                volume,
                diameter: coarse.diameter,
                vertices: ring.len(),
            };
            if b == 0 {
                rep.per_k[k].neck_volume = Some(stats.volume);
                rep.per_k[k].neck_diameter = Some(stats.diameter);
            }
            necks.push(NeckEntry {
                bubble: b,
                k: k + 1,
                r_inner: an.neck_inner,
                r_outer: an.neck_outer,
                stats,
            });
        }
    }

    rep.real_bubbles = (0..bubble_points.len())
        .filter(|&b| info.iter().zip(&limit_nonzero).any(|(s, &real)| s.bubble == b && real))
        .count();
    rep.sequence_info = info;
    rep.bubbles = Some(BubbleReport {
        bubble_points: bubble_points.to_vec(),
        tail,
        eps_detect: th.eps_detect,
        sequences,
        pair_classification: pairs,
        neck_stats: necks,
        limit_nonzero,
    });
    Ok(())
}

fn cylinder_bands(
    cfg: &ScenarioConfig,
    rep: &mut RunReport,
    m: &GridManifold,
    bands: &BandDecomposition,
    fam: &Family,
) -> Result<()> {
    let th = &cfg.thresholds;
    for (p, v) in rep.per_k.iter_mut().zip(&fam.fields) {
        p.three_circles = Some(three_circles_check(m, bands, v, th.band_l, th.eps_three_circles)?);
    }
    if bands.len() >= 4 {
        rep.decay = Some(singularity_decay_profile(m, bands, fam.fields.last().expect("K >= 4"), th.p_sobolev)?);
    }
    Ok(())
}

fn checks(cfg: &ScenarioConfig, rep: &RunReport) -> Vec<Check> {
    let tol = &cfg.checks;
    let mut out = Vec::new();
    let per_k = &rep.per_k;
    let first = &per_k[0];
    let last = per_k.last().expect("K >= 4");
    if cfg.normalize {
        let worst = per_k.iter().map(|p| (p.volume - 1.0).abs()).fold(0.0, f64::max);
        out.push(Check::new("volume_normalized", worst, Relation::Le, tol.volume, "max_k |Vol(g_k) - 1|"));
    }
    let pairs = rep.bubbles.as_ref().map_or(&[][..], |b| &b.pair_classification[..]);
    let n_bubbles = rep.bubbles.as_ref().map_or(0, |b| b.bubble_points.len());
    match &cfg.family {
        FamilySpec::SmoothConvergent { .. } => {
            let gaps: Vec<Option<f64>> = per_k.iter().map(|p| p.local_gap).collect();
            out.push(Check::new(
                "distance_gaps_decreasing",
                max_step_ratio(&gaps),
                Relation::Lt,
                1.0,
                "max_k gap_{k+1} / gap_k",
            ));
            let ratio = match (last.local_gap, last.construction_gap) {
                (Some(g), Some(c)) if c > 0.0 => g / c,
                _ => f64::NAN,
            };
            out.push(Check::new(
                "final_gap_vs_construction",
                ratio,
                Relation::Le,
                tol.gap_factor,
                "gap_K / construction gap_K",
            ));
            let gh = match (last.gh_upper, rep.reference_diameter) {
                (Some(g), Some(d)) if d > 0.0 => g / d,
                _ => f64::NAN,
            };
            out.push(Check::new("gh_final_relative", gh, Relation::Le, tol.gh_relative, "GH upper bound at K / diam(d_u)"));
            let q1 = first.heat_ratio;
            let spread = per_k
                .iter()
                .map(|p| if q1 != 0.0 { (p.heat_ratio / q1 - 1.0).abs() } else { f64::NAN })
                .fold(0.0, f64::max);
            out.push(Check::new(
                "heat_ratio_band",
                spread,
                Relation::Le,
                tol.heat_ratio_band,
                "max_k |q_k / q_1 - 1|, q = a1/sqrt(a0)",
            ));
            out.push(Check::flag("case_1", rep.case == CaseClass::Case1, rep.case.label()));
        }
        FamilySpec::SingleBubble { .. } => {
            out.push(Check::new("bubble_count", n_bubbles as f64, Relation::Eq, 1.0, "detected bubble points"));
            let same = !pairs.is_empty() && pairs.iter().all(|p| p.class == PairClass::EssentiallySame);
            out.push(Check::flag(
                "sequences_essentially_same",
                same,
                format!("{} pair(s) classified", pairs.len()),
            ));
            let reduction = |f: &dyn Fn(&PerK) -> Option<f64>| match (f(&per_k[1]), f(last)) {
                (Some(a), Some(b)) if b > 0.0 => a / b,
                _ => f64::NAN,
            };
            out.push(Check::new(
                "neck_volume_reduction",
                reduction(&|p| p.neck_volume),
                Relation::Ge,
                tol.neck_reduction,
                "Vol(neck)_2 / Vol(neck)_K",
            ));
            out.push(Check::new(
                "neck_diameter_reduction",
                reduction(&|p| p.neck_diameter),
                Relation::Ge,
                tol.neck_reduction,
                "diam(neck)_2 / diam(neck)_K",
            ));
            if let Some(t) = &rep.thresholds {
                out.push(Check::new(
                    "tail_ratio_vs_yamabe_over_6",
                    (t.relative_to_yamabe_over_6 - 1.0).abs(),
                    Relation::Le,
                    tol.tail_ratio,
                    format!(
                        "|liminf q / (Y/6) - 1|; liminf q = {:.4}, Y/6 = {:.4}, Y = {:.4}",
                        t.tail_liminf, t.yamabe_over_6, t.yamabe
                    ),
                ));
            }
            out.push(Check::flag("case_2", rep.case == CaseClass::Case2, rep.case.label()));
        }
        FamilySpec::TwoBubble { centers, .. } => {
            out.push(Check::new(
                "bubble_count",
                n_bubbles as f64,
                Relation::Eq,
                centers.len() as f64,
                "detected bubble points",
            ));
            let info = &rep.sequence_info;
            let across: Vec<_> = pairs
                .iter()
                .filter(|p| info[p.first].bubble != info[p.second].bubble)
                .collect();
            let separated = !across.is_empty() && across.iter().all(|p| p.class == PairClass::Separated);
            out.push(Check::flag(
                "bubbles_separated",
                separated,
                format!("{} cross-bubble pair(s)", across.len()),
            ));
            let l1: Vec<Option<f64>> = per_k.iter().map(|p| p.lambda1).collect();
            out.push(Check::new("lambda1_decreasing", max_step_ratio(&l1), Relation::Lt, 1.0, "max_k λ1_{k+1} / λ1_k"));
        }
        FamilySpec::Dumbbell { .. } => {
            let l1: Vec<Option<f64>> = per_k.iter().map(|p| p.lambda1).collect();
            let pq: Vec<Option<f64>> = per_k.iter().map(|p| p.pinch_quotient).collect();
            out.push(Check::new("lambda1_decreasing", max_step_ratio(&l1), Relation::Lt, 1.0, "max_k λ1_{k+1} / λ1_k"));
            out.push(Check::new("pinch_decreasing", max_step_ratio(&pq), Relation::Lt, 1.0, "max_k Q_{k+1} / Q_k"));
            let bound = l1
                .iter()
                .zip(&pq)
                .map(|(l, q)| match (l, q) {
                    (Some(l), Some(q)) if *l > 0.0 => q / l,
                    _ => f64::NAN,
                })
                .fold(f64::INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.min(b) });
            out.push(Check::new(
                "pinch_bounds_lambda1",
                bound,
                Relation::Ge,
                1.0 - tol.pinch_slack,
                "min_k Q_k / λ1_k",
            ));
            let drop = match (first.lambda1, last.lambda1) {
                (Some(a), Some(b)) if a > 0.0 => b / a,
                _ => f64::NAN,
            };
            out.push(Check::new("lambda1_drop", drop, Relation::Le, tol.lambda1_drop, "λ1_K / λ1_1"));
        }
        FamilySpec::CylinderExact { sign, .. } => {
            let verdicts: Vec<_> = per_k.iter().filter_map(|p| p.three_circles).collect();
            let complete = verdicts.len() == per_k.len();
            out.push(Check::flag(
                "three_circles_implications",
                complete && verdicts.iter().all(|v| v.implications_hold()),
                "clauses (1) and (2) for every k",
            ));
            out.push(Check::flag(
                "three_circles_trichotomy",
                complete && verdicts.iter().all(|v| v.trichotomy_holds),
                "clause (3) as stated for every k",
            ));
            if *sign < 0.0 {
                if let Some(d) = &rep.decay {
                    out.push(Check::flag(
                        "decay_summable",
                        d.summable,
                        format!("fitted band ratio {:.6}, p = {}", d.rate, d.p),
                    ));
                }
            }
        }
    }
    out
}

/// Write the report, tables and `.dat` series into `dir`.
fn write_outputs(dir: &Path, cfg: &ScenarioConfig, rep: &RunReport, art: &Artifacts) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    std::fs::write(dir.join("report.toml"), rep.to_toml()?)?;
    std::fs::write(dir.join("summary.txt"), rep.render())?;
    write_per_k_csv(&dir.join("per_k.csv"), rep)?;
    write_checks_csv(&dir.join("checks.csv"), rep)?;
    if let Some(p) = &art.concentration {
        write_concentration_csv(&dir.join("concentration.csv"), p)?;
    }
    if let Some(c) = &art.convergence {
        write_convergence_csv(&dir.join("convergence.csv"), c)?;
    }
    if let Some(b) = &rep.bubbles {
        b.write(&dir.join("bubbles.toml"))?;
    }
    for (name, series) in dat_series(rep) {
        write_dat(&dir.join(format!("{name}.dat")), &series)?;
    }
    Ok(())
}
