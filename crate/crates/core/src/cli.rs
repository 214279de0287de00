//! Command-line front end of the `stokeslc` binary.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 refused configuration
//! (singular or unstable), 1 I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    case_mesh, convergence_run, error_norms, reference_deviation, solve_problem, write_convergence_csv,
    write_errors_csv, write_json, ErrorDeviation, ErrorNorms, Problem,
};
use crate::mesh::{corner_elements, read_mesh, regularity_ratio, Mesh, Patch, PatchClass, Pattern};
use crate::solver::SolveReport;
use crate::spaces::{build_dof_map, PressureSpaceKind};
use crate::stability::{self, analyze_patch, random_pressure, verify_projection_theorems, InfSupReport};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "stokeslc", version, about = "Mixed finite elements for 2D Stokes flow with linear-plus-constant pressure")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a benchmark problem on one grid and report its errors.
    Solve(SolveArgs),
    /// Run a grid sequence and estimate convergence orders.
    Convergence(ConvergenceArgs),
    /// Patch and global stability checks.
    #[command(subcommand)]
    Stability(StabilityCommand),
    /// Mesh inspection.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Debug, Subcommand)]
enum StabilityCommand {
    /// Patch algebra, projections and patch inf-sup constants.
    Patch(PatchArgs),
    /// Discrete inf-sup constant of a whole grid.
    Global(GlobalArgs),
}

#[derive(Debug, Subcommand)]
enum MeshCommand {
    /// Counts, corner elements and regularity of a mesh.
    Info(MeshArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Cells per side of the unit square.
    #[arg(long, default_value_t = 8)]
    grid: usize,
    #[arg(long, default_value_t = Pattern::Right, value_parser = parse_pattern)]
    pattern: Pattern,
    /// Keep the plain diagonal pattern instead of splitting the corner cells
    /// through the domain corners.
    #[arg(long)]
    allow_corners: bool,
    /// Read the mesh from a file instead of generating a grid.
    #[arg(long)]
    mesh: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "lc", value_parser = parse_kind)]
    element: PressureSpaceKind,
    #[arg(long, default_value = "griffiths", value_parser = parse_problem)]
    problem: Problem,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    /// Comma-separated grid sizes, each double the previous.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16])]
    grids: Vec<usize>,
    /// Comma-separated element kinds.
    #[arg(long, value_delimiter = ',', default_value = "th,lc", value_parser = parse_kind)]
    element: Vec<PressureSpaceKind>,
    #[arg(long, default_value_t = Pattern::Right, value_parser = parse_pattern)]
    pattern: Pattern,
    #[arg(long, default_value = "griffiths", value_parser = parse_problem)]
    problem: Problem,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[arg(long)]
    allow_corners: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct PatchArgs {
    /// Patch class: 1, 2 or 3.
    #[arg(long, value_parser = parse_class)]
    class: PatchClass,
    /// Number of random patches.
    #[arg(long, default_value_t = 100)]
    random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Analyse the three triangles of this mesh file instead.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "lc", value_parser = parse_kind)]
    element: PressureSpaceKind,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct MeshArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: Output,
}

fn parse_kind(s: &str) -> std::result::Result<PressureSpaceKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pattern(s: &str) -> std::result::Result<Pattern, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_problem(s: &str) -> std::result::Result<Problem, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_class(s: &str) -> std::result::Result<PatchClass, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Reports go to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::Refused(msg)) => {
            let _ = writeln!(stderr, "refused: {msg}");
            3
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsupportedGrid(_) | Error::SingularSystem { .. } | Error::DegeneratePatch(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

enum Outcome {
    Done,
    Refused(String),
}

fn load_mesh(path: &Path) -> Result<Mesh> {
    read_mesh(BufReader::new(File::open(path)?))
}

fn grid_mesh(g: &GridArgs, kind: PressureSpaceKind) -> Result<Mesh> {
    match &g.mesh {
        Some(path) => load_mesh(path),
        None => case_mesh(g.grid, g.pattern, kind, g.allow_corners),
    }
}

/// Like [`grid_mesh`] but never refuses a mesh with corner elements.
fn analysis_mesh(g: &GridArgs) -> Result<Mesh> {
    match &g.mesh {
        Some(path) => load_mesh(path),
        None if g.allow_corners => crate::mesh::generate_structured(g.grid, g.pattern),
        None => crate::mesh::generate_into_corners(g.grid, g.pattern),
    }
}

fn emit(output: &Output, stdout: &mut dyn Write, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &output.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => write(stdout),
    }
}

fn json_only(output: &Output) -> Result<()> {
    match output.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::InvalidArgument("this report is only available as json".into())),
    }
}

#[derive(Serialize)]
struct SolveOutput {
    grid: Option<usize>,
    element: &'static str,
    problem: Problem,
    pattern: Option<Pattern>,
    nu: f64,
    errors: ErrorNorms,
    max_element_divergence: f64,
    velocity_unknowns: usize,
    pressure_unknowns: usize,
    solve: SolveReport,
    reference_deviation: Option<ErrorDeviation>,
}

#[derive(Serialize)]
struct PatchOutput {
    class: PatchClass,
    report: stability::StabilityReport,
    theorem_residual: f64,
}

#[derive(Serialize)]
struct MeshOutput {
    vertices: usize,
    triangles: usize,
    edges: usize,
    corner_elements: Vec<usize>,
    regularity_ratio: f64,
    total_area: f64,
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Solve(a) => {
            let mesh = grid_mesh(&a.grid, a.element)?;
            if a.element == PressureSpaceKind::Lc && !corner_elements(&mesh)?.is_empty() {
                return Ok(Outcome::Refused(
                    "LC pressure on a mesh with elements having two boundary sides is singular; use lctied".into(),
                ));
            }
            let (dofmap, solution) = solve_problem(&mesh, a.element, a.problem, a.nu)?;
            let errors = error_norms(&mesh, &solution, a.problem);
            let divergence = crate::assembly::element_divergence_integrals(&mesh, &solution.u);
            let grid = a.grid.mesh.is_none().then_some(a.grid.grid);
            let out = SolveOutput {
                grid,
                element: a.element.short_name(),
                problem: a.problem,
                pattern: grid.map(|_| a.grid.pattern),
                nu: a.nu,
                errors,
                max_element_divergence: divergence.iter().fold(0.0, |m, v| m.max(v.abs())),
                velocity_unknowns: dofmap.num_velocity(),
                pressure_unknowns: dofmap.num_pressure(),
                solve: solution.report,
                reference_deviation: grid.and_then(|n| reference_deviation(a.element, n, a.problem, &errors)),
            };
            emit(&a.output, stdout, |w| match a.output.format {
                Format::Json => write_json(&out, w),
                Format::Csv => {
                    let label = grid.map_or_else(|| "file".to_string(), |n| n.to_string());
                    write_errors_csv(&label, a.element.short_name(), &errors, w)
                }
            })?;
            Ok(Outcome::Done)
        }
        Command::Convergence(a) => {
            let table = convergence_run(&a.grids, &a.element, a.pattern, a.problem, a.nu, a.allow_corners)?;
            emit(&a.output, stdout, |w| match a.output.format {
                Format::Json => write_json(&table, w),
                Format::Csv => write_convergence_csv(&table, w),
            })?;
            Ok(Outcome::Done)
        }
        Command::Stability(StabilityCommand::Patch(a)) => {
            json_only(&a.output)?;
            if let Some(path) = &a.mesh {
                let mesh = load_mesh(path)?;
                if mesh.num_triangles() != 3 {
                    return Err(Error::InvalidArgument(format!(
                        "patch files hold exactly 3 triangles, found {}",
                        mesh.num_triangles()
                    )));
                }
                let patch = Patch::classify(&mesh, [0, 1, 2])?;
                if patch.class != a.class {
                    return Err(Error::InvalidArgument(format!("mesh patch is {}, not {}", patch.class, a.class)));
                }
                let report = analyze_patch(&patch, true)?;
                let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(a.seed);
                let p = random_pressure(patch.num_pressure(), &mut rng);
                let theorem_residual = verify_projection_theorems(&patch, &p, patch.class)?.max();
                let stable = report.stable;
                let out = PatchOutput { class: patch.class, report, theorem_residual };
                emit(&a.output, stdout, |w| write_json(&out, w))?;
                return Ok(if stable { Outcome::Done } else { Outcome::Refused("patch is unstable".into()) });
            }
            if a.random == 0 {
                return Err(Error::InvalidArgument("--random must be positive".into()));
            }
            let study = stability::random_study(a.class, a.random, a.seed)?;
            let verdict = if study.stable { "stable" } else { "unstable" };
            if a.output.out.is_some() {
                writeln!(
                    stdout,
                    "{} patches of {}: verdict {verdict}, max theorem residual {:.3e}, min beta {:.6}",
                    study.count, study.class, study.max_theorem_residual, study.beta_min
                )?;
            }
            emit(&a.output, stdout, |w| write_json(&study, w))?;
            Ok(if study.stable { Outcome::Done } else { Outcome::Refused("unstable patch found".into()) })
        }
        Command::Stability(StabilityCommand::Global(a)) => {
            json_only(&a.output)?;
            let mesh = analysis_mesh(&a.grid)?;
            let dofmap = build_dof_map(&mesh, a.element, false)?;
            let report: InfSupReport = stability::global_inf_sup(&mesh, &dofmap)?;
            let stable = report.beta > 0.0;
            emit(&a.output, stdout, |w| write_json(&report, w))?;
            Ok(if stable { Outcome::Done } else { Outcome::Refused("discrete inf-sup constant is zero".into()) })
        }
        Command::Mesh(MeshCommand::Info(a)) => {
            json_only(&a.output)?;
            let mesh = analysis_mesh(&a.grid)?;
            let out = MeshOutput {
                vertices: mesh.num_vertices(),
                triangles: mesh.num_triangles(),
                edges: mesh.num_edges(),
                corner_elements: corner_elements(&mesh)?,
                regularity_ratio: regularity_ratio(&mesh),
                total_area: mesh.total_area(),
            };
            emit(&a.output, stdout, |w| write_json(&out, w))?;
            Ok(Outcome::Done)
        }
    }
}

