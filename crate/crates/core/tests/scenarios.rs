use conflab_core::conformal::heat_invariants;
use conflab_core::scenario::{build_mesh, gen_family, run_scenario, CaseClass, RunReport, ScenarioConfig};
use conflab_core::spectral::{laplace_spectrum, SolverOptions};
use conflab_core::Error;

const SMALL: &str = r#"
schema_version = 1
name = "small_smooth"
seed = 3
family_len = 4

[mesh]
topology = "torus"
dim = 4
side = 6.283185307179586
divisions = 8

[family]
kind = "smooth_convergent"

[analysis]
landmarks = 12
"#;

fn small() -> ScenarioConfig {
    ScenarioConfig::from_toml(SMALL).unwrap()
}

#[test]
fn failing_stage_leaves_an_incomplete_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::from_toml(
        r#"
schema_version = 1
name = "outside"
family_len = 4

[mesh]
topology = "stereo_ball"
dim = 4
cutoff = 1.0
divisions = 8
vertex_budget = 100000

[family]
kind = "single_bubble"
center = [0.9, 0.0, 0.0, 0.0]
lambda_start = 0.3
lambda_ratio = 0.5
background_start = 0.2
background_ratio = 0.5
"#,
    )
    .unwrap();
    cfg.output_dir = Some(dir.path().to_path_buf());
    match run_scenario(&cfg) {
        Err(Error::Stage { stage, source }) => {
            assert_eq!(stage, "family");
            assert!(matches!(*source, Error::OutsideChart(_)), "{source}");
        }
        other => panic!("expected a stage error, got {other:?}"),
    }
    let report = RunReport::read(&dir.path().join("report.toml")).unwrap();
    assert!(!report.complete);
    assert_eq!(report.failed_stage.as_deref(), Some("family"));
    assert!(!report.all_passed());
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("INCOMPLETE"), "{summary}");
}

#[test]
fn identical_seeds_give_identical_tables() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let mut cfg = small();
        cfg.output_dir = Some(dir.path().to_path_buf());
        run_scenario(&cfg).unwrap();
    }
    for f in ["per_k.csv", "checks.csv", "concentration.csv", "convergence.csv", "report.toml"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn report_quantities_are_recomputable() {
    let cfg = small();
    let report = run_scenario(&cfg).unwrap();
    assert!(report.complete);
    assert_eq!(report.case, CaseClass::Case1);

    let (m, _) = build_mesh(&cfg).unwrap();
    let fam = gen_family(&cfg, &m).unwrap();
    let opts = SolverOptions {
        seed: cfg.seed,
        tolerance: cfg.analysis.spectrum_tolerance,
        ..Default::default()
    };
    for (p, u) in report.per_k.iter().zip(&fam.fields) {
        let inv = heat_invariants(&m, u).unwrap();
        assert_eq!(p.a0, inv.a0);
        assert_eq!(p.a1, inv.a1);
        assert_eq!(p.curvature_energy, inv.r2_integral);
        let s = laplace_spectrum(&m, u, cfg.analysis.spectrum_count, &opts).unwrap();
        assert_eq!(p.lambda1, s.lambda1);
    }
}

#[test]
fn every_check_cites_its_tolerance() {
    let report = run_scenario(&small()).unwrap();
    assert!(!report.checks.is_empty());
    let text = report.render();
    for c in &report.checks {
        assert!(c.tolerance.is_finite());
        let line = text.lines().find(|l| l.contains(&format!(" {}:", c.name))).unwrap();
        assert!(line.contains(&format!("{:.6e}", c.tolerance)), "{line}");
    }
}

#[test]
fn config_round_trips_through_its_file_format() {
    for name in ["smooth_convergent", "single_bubble", "two_bubble", "dumbbell", "cylinder_exact"] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../scenarios")
            .join(format!("{name}.toml"));
        let cfg = ScenarioConfig::read(&path).unwrap();
        let back = ScenarioConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, back, "{name}");
    }
}
