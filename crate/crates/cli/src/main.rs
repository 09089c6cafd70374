//! `conflab`: command-line front end for the conformal geometry laboratory.
//!
//! Exit codes: 0 on success, 1 when a scenario check fails or a stage
//! errors, 2 on usage or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use conflab_core::bubble::{concentration_scan, write_concentration_csv};
use conflab_core::conformal::{
    heat_invariants, read_field, scalar_curvature, write_diagnostics_csv, write_field, ConformalField, ThresholdConfig,
};
use conflab_core::grid::{read_mesh, write_mesh};
use conflab_core::metric::{farthest_point_landmarks, write_distance_csv, PathStencil};
use conflab_core::scenario::{
    build_mesh, configure_threads, default_radii, gen_family, run_scenario, scan_centers, yamabe_constant, RunReport,
    ScenarioConfig, THREADS_ENV,
};
use conflab_core::spectral::{laplace_spectrum, write_heat_csv, write_spectrum_csv, HeatCompletion, SolverOptions};
use conflab_core::{Error, GridManifold, MeshDescriptor};

#[derive(Parser)]
#[command(name = "conflab", version, about = "Conformal geometry laboratory on model grids")]
#[command(after_help = "The worker thread count is read from CONFLAB_THREADS.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh descriptors.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Conformal-factor families.
    Field {
        #[command(subcommand)]
        command: FieldCommand,
    },
    /// Scalar curvature and heat invariants of one field.
    Curvature(CurvatureArgs),
    /// Smallest Laplace eigenvalues of one field.
    Spectrum(SpectrumArgs),
    /// Conformal distances between farthest-point landmarks.
    Distance(DistanceArgs),
    /// Curvature-concentration scan over a family.
    Bubbles(BubblesArgs),
    /// End-to-end scenario runs.
    Scenario {
        #[command(subcommand)]
        command: ScenarioCommand,
    },
    /// Saved run reports.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Build the mesh of a scenario config (or a bare descriptor) and save it.
    Gen {
        /// Scenario config with a [mesh] table, or a mesh descriptor file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Generate a scenario family: mesh.toml, field_<k>.bin and reference.bin.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct FieldInput {
    /// Mesh descriptor written by `mesh gen` or `field gen`.
    #[arg(long)]
    mesh: PathBuf,
    /// Field file written by `field gen`.
    #[arg(long)]
    field: PathBuf,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    input: FieldInput,
    /// Per-vertex CSV with u, R and the unreliable flag.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: FieldInput,
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Eigenvalue CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Heat-trace CSV over log-spaced times, with the Weyl tail.
    #[arg(long)]
    heat: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StencilArg {
    Axis,
    FaceDiagonal,
    Full,
}

impl From<StencilArg> for PathStencil {
    fn from(s: StencilArg) -> Self {
        match s {
            StencilArg::Axis => PathStencil::Axis,
            StencilArg::FaceDiagonal => PathStencil::FaceDiagonal,
            StencilArg::Full => PathStencil::Full,
        }
    }
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    input: FieldInput,
    #[arg(long, default_value_t = 16)]
    landmarks: usize,
    #[arg(long, value_enum, default_value = "face-diagonal")]
    stencil: StencilArg,
    /// Landmark-pair distance CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BubblesArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Family members in order.
    #[arg(long, num_args = 1.., required = true)]
    fields: Vec<PathBuf>,
    /// Concentration threshold; defaults to the configured default.
    #[arg(long)]
    eps: Option<f64>,
    /// Scan radii; defaults to 8 log-spaced values from 2h to 8h.
    #[arg(long, num_args = 1..)]
    radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = 4)]
    center_stride: usize,
    /// Concentration CSV (k, center, radius, energy).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Run a scenario, print its summary and write the report.
    Run {
        config: PathBuf,
        /// Overrides the config's output_dir.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Print the summary of a saved report.toml.
    Render { report: PathBuf },
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Failure { code: 2, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(e) if is_usage(e) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::Format(_)
            | Error::InvalidMesh(_)
            | Error::VertexBudget { .. }
            | Error::InvalidArgument(_)
            | Error::FieldLength { .. }
            | Error::OutsideChart(_)
            | Error::Io(_)
    )
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .map_err(|e| Failure::usage(anyhow!(e).context(format!("reading {THREADS_ENV}"))))
        .and_then(|_| dispatch(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", describe(&f.error));
            ExitCode::from(f.code)
        }
    }
}

/// The error chain joined by ": ", skipping causes whose text an outer
/// message already includes.
fn describe(error: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in error.chain() {
        let s = cause.to_string();
        if !out.contains(&s) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&s);
        }
    }
    out
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Mesh {
            command: MeshCommand::Gen { config, out },
        } => mesh_gen(&config, &out),
        Command::Field {
            command: FieldCommand::Gen { config, out_dir },
        } => field_gen(&config, &out_dir),
        Command::Curvature(args) => curvature(&args),
        Command::Spectrum(args) => spectrum(&args),
        Command::Distance(args) => distance(&args),
        Command::Bubbles(args) => bubbles(&args),
        Command::Scenario {
            command: ScenarioCommand::Run { config, output_dir },
        } => scenario_run(&config, output_dir),
        Command::Report {
            command: ReportCommand::Render { report },
        } => {
            let r = RunReport::read(&report).with_context(|| format!("reading {}", report.display()))?;
            print!("{}", r.render());
            Ok(())
        }
    }
}

/// A scenario config's `[mesh]` table, or a bare mesh descriptor.
fn read_descriptor(path: &Path) -> Result<MeshDescriptor, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::usage)?;
    let value: toml::Table = text
        .parse()
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::usage)?;
    let table = match value.get("mesh") {
        Some(mesh) => mesh.clone(),
        None => toml::Value::Table(value),
    };
    table
        .try_into()
        .with_context(|| format!("{} holds no valid mesh descriptor", path.display()))
        .map_err(Failure::usage)
}

fn print_mesh(m: &GridManifold) {
    println!("topology: {}", m.topology().name());
    println!("dim: {}", m.dim());
    println!("vertices: {}", m.len());
    println!("base volume: {:.6}", m.total_volume());
}

fn mesh_gen(config: &Path, out: &Path) -> CliResult {
    let m = read_descriptor(config)?.build()?;
    write_mesh(out, &m)?;
    print_mesh(&m);
    println!("wrote {}", out.display());
    Ok(())
}

fn field_gen(config: &Path, out_dir: &Path) -> CliResult {
    let cfg = ScenarioConfig::read(config)?;
    let (m, _) = build_mesh(&cfg)?;
    let fam = gen_family(&cfg, &m)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_mesh(&out_dir.join("mesh.toml"), &m)?;
    print_mesh(&m);
    for (k, u) in fam.fields.iter().enumerate() {
        let path = out_dir.join(format!("field_{}.bin", k + 1));
        write_field(&path, &m, u.values())?;
        println!("k = {}: scale {:.6e} -> {}", k + 1, fam.scales[k], path.display());
    }
    if let Some(reference) = &fam.reference {
        write_field(&out_dir.join("reference.bin"), &m, reference.values())?;
        println!("reference -> {}", out_dir.join("reference.bin").display());
    }
    Ok(())
}

fn load(input: &FieldInput) -> Result<(GridManifold, ConformalField), Failure> {
    let m = read_mesh(&input.mesh).map_err(|e| Failure::usage(anyhow!(e).context(format!("reading {}", input.mesh.display()))))?;
    let values =
        read_field(&input.field, &m).map_err(|e| Failure::usage(anyhow!(e).context(format!("reading {}", input.field.display()))))?;
    let u = ConformalField::new(&m, values)?;
    Ok((m, u))
}

fn curvature(args: &CurvatureArgs) -> CliResult {
    let (m, u) = load(&args.input)?;
    let r = scalar_curvature(&m, &u)?;
    let inv = heat_invariants(&m, &u)?;
    let reliable: Vec<f64> = r.values.iter().zip(&r.unreliable).filter(|(_, &b)| !b).map(|(&x, _)| x).collect();
    let (lo, hi) = reliable
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    println!("R over reliable vertices: [{lo:.6}, {hi:.6}] ({} of {})", reliable.len(), m.len());
    println!("a0 = {:.9}", inv.a0);
    println!("a1 = {:.9}", inv.a1);
    println!("int R^2 dV = {:.9}", inv.r2_integral);
    println!("a1/sqrt(a0) = {:.9}", inv.a1_over_sqrt_a0());
    if let Ok(y) = yamabe_constant(m.dim()) {
        println!("Y(S^{}) = {:.6}, Y/6 = {:.6}", m.dim(), y, y / 6.0);
    }
    if let Some(out) = &args.out {
        let flags: Vec<f64> = r.unreliable.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        write_diagnostics_csv(out, &m, &[("u", u.values()), ("R", &r.values), ("unreliable", &flags)])?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn spectrum(args: &SpectrumArgs) -> CliResult {
    let (m, u) = load(&args.input)?;
    let opts = SolverOptions {
        tolerance: args.tolerance,
        seed: args.seed,
        ..Default::default()
    };
    let s = laplace_spectrum(&m, &u, args.count, &opts)?;
    for (i, (l, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
        println!("{i:>3}  {l:.12e}  residual {r:.2e}");
    }
    match s.lambda1 {
        Some(l) => println!("lambda1 = {l:.12}"),
        None => println!("lambda1 not among the computed eigenvalues"),
    }
    if let Some(out) = &args.out {
        write_spectrum_csv(out, &s)?;
        println!("wrote {}", out.display());
    }
    if let Some(out) = &args.heat {
        let times: Vec<f64> = (0..25).map(|i| 10f64.powf(-3.0 + 0.125 * i as f64)).collect();
        write_heat_csv(out, &s, &times, HeatCompletion::WeylTail)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn distance(args: &DistanceArgs) -> CliResult {
    let (m, u) = load(&args.input)?;
    let lm = farthest_point_landmarks(&m, &u, args.landmarks, None, args.stencil.into())?;
    let d = lm.rows.source_matrix();
    let diam = d.iter().copied().fold(0.0, f64::max);
    println!("landmarks: {}", lm.vertices.len());
    println!("covering radius: {:.9}", lm.covering_radius);
    println!("landmark diameter: {diam:.9}");
    if let Some(out) = &args.out {
        write_distance_csv(out, &lm.rows)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn bubbles(args: &BubblesArgs) -> CliResult {
    let m = read_mesh(&args.mesh).map_err(|e| Failure::usage(anyhow!(e).context(format!("reading {}", args.mesh.display()))))?;
    let fields = args
        .fields
        .iter()
        .map(|p| {
            read_field(p, &m)
                .and_then(|v| ConformalField::new(&m, v))
                .map_err(|e| Failure::usage(anyhow!(e).context(format!("reading {}", p.display()))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let eps = args.eps.unwrap_or_else(|| ThresholdConfig::default().eps_detect);
    let radii = args.radii.clone().unwrap_or_else(|| default_radii(&m));
    let centers = scan_centers(&m, &fields, args.center_stride)?;
    let scan = concentration_scan(&m, &fields, &centers, &radii, eps)?;
    println!("centers scanned: {}", centers.len());
    println!("bubble points: {}", scan.bubble_points.len());
    for &p in &scan.bubble_points {
        let x: Vec<String> = m.coords(p).iter().map(|c| format!("{c:.4}")).collect();
        println!("  vertex {p} at ({})", x.join(", "));
    }
    if let Some(out) = &args.out {
        write_concentration_csv(out, &scan.profile)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn scenario_run(config: &Path, output_dir: Option<PathBuf>) -> CliResult {
    let mut cfg = ScenarioConfig::read(config)
        .map_err(|e| Failure::usage(anyhow!(e).context(format!("reading {}", config.display()))))?;
    if output_dir.is_some() {
        cfg.output_dir = output_dir;
    }
    let report = run_scenario(&cfg)?;
    print!("{}", report.render());
    if let Some(dir) = &cfg.output_dir {
        println!("report written to {}", dir.display());
    }
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Err(Failure {
            code: 1,
            error: anyhow!("failed checks: {}", failed.join(", ")),
        })
    }
}
