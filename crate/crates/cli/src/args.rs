//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::problem::Preset;

#[derive(Debug, Parser)]
#[command(name = "dmpfem", version, about = "P1 finite elements with discrete maximum principle certificates")]
pub struct Cli {
    /// Run every per-cell loop on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a structured mesh of the unit square or cube.
    MeshGen(MeshGenArgs),
    /// Solve a problem and write the discrete solution.
    Solve(SolveArgs),
    /// Certify the discrete maximum principle for a solution.
    DmpCheck(CheckArgs),
    /// Summarize certificates as a table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    /// Unit square split into NX × NY lattice squares.
    #[arg(long, value_name = "NXxNY")]
    pub square: Option<String>,
    /// Unit cube split into NX × NY × NZ Kuhn cubes.
    #[arg(long, value_name = "NXxNYxNZ")]
    pub cube: Option<String>,
    /// Square splitting: right-diagonal or crisscross.
    #[arg(long, default_value = "right-diagonal")]
    pub pattern: String,
    /// Shear `x ↦ x + skew·y` applied to the square lattice.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub skew: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MeshGenArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Mesh JSON path.
    #[arg(short, long, default_value = "mesh.json")]
    pub output: PathBuf,
    /// Also write a legacy VTK file.
    #[arg(long)]
    pub vtk: Option<PathBuf>,
    /// Exponent of the acuteness fit reported by the audit.
    #[arg(long, default_value_t = 1.0)]
    pub alpha_exponent: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MeshSourceArgs {
    /// Mesh JSON file.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Built-in problem: poisson, advection-diffusion or quasilinear.
    #[arg(long, conflicts_with = "spec")]
    pub problem: Option<Preset>,
    /// Problem spec JSON with coefficient expressions.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Source term expression (overrides the spec).
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Dirichlet data expression (overrides the spec).
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Diffusion constant of the advection-diffusion preset.
    #[arg(long, default_value_t = 1.0)]
    pub a0: f64,
    /// Advection vector of the advection-diffusion preset.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Option<Vec<f64>>,
    /// Seed of the coefficient spot check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of random spot-check samples.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Picard iteration cap [default: 100].
    #[arg(long)]
    pub picard_max_iter: Option<usize>,
    /// Relative update tolerance [default: 1e-10].
    #[arg(long)]
    pub picard_tol: Option<f64>,
    /// Iterative solver cap [default: 10000].
    #[arg(long)]
    pub linear_max_iter: Option<usize>,
    /// Relative residual tolerance of the linear solver [default: 1e-12].
    #[arg(long)]
    pub linear_tol: Option<f64>,
    /// Picard relaxation in (0, 1] [default: 1].
    #[arg(long)]
    pub damping: Option<f64>,
    /// Krylov dimension before restart [default: 30].
    #[arg(long)]
    pub gmres_restart: Option<usize>,
    /// auto, dense-lu or gmres.
    #[arg(long)]
    pub linear_method: Option<String>,
    /// Exactness degree of the element quadrature.
    #[arg(long)]
    pub quadrature_degree: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct DmpArgs {
    /// Sobolev exponent, 2 < p (< 2d/(d-2) in 3D).
    #[arg(long, default_value_t = 4.0)]
    pub p: f64,
    /// Hölder exponent, 1 <= r < p - 1.
    #[arg(long, default_value_t = 2.0)]
    pub r: f64,
    /// Margin of element cases (i) and (ii) [default: 0.1·lambda].
    #[arg(long)]
    pub lambda_star: Option<f64>,
    /// Exponent of the acuteness fit in the angle audit.
    #[arg(long, default_value_t = 1.0)]
    pub alpha_exponent: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub mesh: MeshSourceArgs,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
}

pub const ALL_CHECKS: [&str; 6] = ["angles", "element", "edge", "assumption", "bounds", "degiorgi"];

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub mesh: MeshSourceArgs,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub dmp: DmpArgs,
    /// Solve first instead of reading a solution.
    #[arg(long, conflicts_with = "solution")]
    pub solve: bool,
    /// Solution CSV written by `solve`.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Result JSON written by `solve`; defaults to result.json next to the
    /// solution.
    #[arg(long, requires = "solution")]
    pub result: Option<PathBuf>,
    /// Comma-separated subset of angles, element, edge, assumption, bounds,
    /// degiorgi.
    #[arg(long, value_delimiter = ',', default_values_t = ALL_CHECKS.map(String::from))]
    pub checks: Vec<String>,
    /// Element case i, ii or iii; chosen from the coefficients when absent.
    #[arg(long)]
    pub element_case: Option<String>,
    /// Number of level-set iterations checked for decay.
    #[arg(long, default_value_t = 40)]
    pub tau_max: usize,
    /// Slack allowed in `sup u_h <= k*`.
    #[arg(long, default_value_t = 1e-9)]
    pub bound_tolerance: f64,
    /// Output directory.
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Certificate JSON files.
    #[arg(required = true)]
    pub certificates: Vec<PathBuf>,
    /// Also write `h`, the empirical constant and the bounds as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
