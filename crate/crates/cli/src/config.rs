//! Resolved run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use dmpfem::dmp::DmpParams;
use dmpfem::mesh::{generate_structured_2d, generate_structured_3d, Mesh, Pattern};
use dmpfem::solver::{LinearMethod, SolveOptions};
use dmpfem::Execution;
use serde::{Deserialize, Serialize};

use crate::args::{DmpArgs, GeneratorArgs, MeshSourceArgs, ProblemArgs, SolverArgs};
use crate::problem::{Preset, ProblemSpec};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeshSource {
    File { path: PathBuf },
    Square { nx: usize, ny: usize, pattern: String, skew: f64 },
    Cube { nx: usize, ny: usize, nz: usize },
}

fn parse_dims(text: &str, n: usize) -> Result<Vec<usize>, CliError> {
    let dims: Option<Vec<usize>> = text.split(['x', 'X']).map(|s| s.trim().parse().ok()).collect();
    match dims {
        Some(d) if d.len() == n && d.iter().all(|&v| v > 0) => Ok(d),
        _ => Err(CliError::Usage(format!("expected {n} positive sizes separated by `x`, got `{text}`"))),
    }
}

impl MeshSource {
    pub fn from_generator(args: &GeneratorArgs) -> Result<Option<Self>, CliError> {
        match (&args.square, &args.cube) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either --square or --cube, not both".into())),
            (Some(s), None) => {
                let d = parse_dims(s, 2)?;
                args.pattern.parse::<Pattern>()?;
                Ok(Some(MeshSource::Square { nx: d[0], ny: d[1], pattern: args.pattern.clone(), skew: args.skew }))
            }
            (None, Some(s)) => {
                let d = parse_dims(s, 3)?;
                Ok(Some(MeshSource::Cube { nx: d[0], ny: d[1], nz: d[2] }))
            }
            (None, None) => Ok(None),
        }
    }

    /// Exactly one of a file or a generator.
    pub fn from_args(args: &MeshSourceArgs) -> Result<Self, CliError> {
        let generated = Self::from_generator(&args.generator)?;
        match (&args.mesh, generated) {
            (Some(path), None) => Ok(MeshSource::File { path: path.clone() }),
            (None, Some(g)) => Ok(g),
            (Some(_), Some(_)) => {
                Err(CliError::Usage("give exactly one mesh source, not --mesh and a generator".into()))
            }
            (None, None) => Err(CliError::Usage("no mesh source: use --mesh, --square or --cube".into())),
        }
    }

    pub fn load(&self) -> Result<Mesh, CliError> {
        Ok(match self {
            MeshSource::File { path } => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                Mesh::from_json(&text)?
            }
            MeshSource::Square { nx, ny, pattern, skew } => generate_structured_2d(*nx, *ny, pattern.parse()?, *skew)?,
            MeshSource::Cube { nx, ny, nz } => generate_structured_3d(*nx, *ny, *nz)?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    pub problem: ProblemSpec,
    pub mesh: MeshSource,
    pub solver: SolveOptions,
    pub dmp: DmpParams,
    pub output: PathBuf,
    pub seed: u64,
    pub samples: usize,
}

impl RunConfig {
    pub fn new(
        mesh: &MeshSourceArgs,
        problem: &ProblemArgs,
        solver: &SolverArgs,
        dmp: Option<&DmpArgs>,
        output: &Path,
        execution: Execution,
    ) -> Result<Self, CliError> {
        let mesh = MeshSource::from_args(mesh)?;
        let (preset, mut spec) = match (problem.problem, &problem.spec) {
            (Some(p), None) => {
                let dim = if matches!(mesh, MeshSource::Cube { .. }) { 3 } else { 2 };
                let default_b = if dim == 3 { vec![1.0, 0.0, 0.0] } else { vec![1.0, 0.0] };
                let b = problem.b.clone().unwrap_or(default_b);
                (Some(p), ProblemSpec::preset(p, "-1", "0", problem.a0, &b))
            }
            (None, Some(path)) => (None, ProblemSpec::read(path)?),
            _ => return Err(CliError::Usage("give exactly one of --problem and --spec".into())),
        };
        if let Some(f) = &problem.f {
            spec.f = f.clone();
        }
        if let Some(g) = &problem.g {
            spec.g = g.clone();
        }

        let mut opts = SolveOptions { execution, ..SolveOptions::default() };
        if let Some(v) = solver.picard_max_iter {
            opts.picard_max_iter = v;
        }
        if let Some(v) = solver.picard_tol {
            opts.picard_tol = v;
        }
        if let Some(v) = solver.linear_max_iter {
            opts.linear_max_iter = v;
        }
        if let Some(v) = solver.linear_tol {
            opts.linear_tol = v;
        }
        if let Some(v) = solver.damping {
            opts.damping = v;
        }
        if let Some(v) = solver.gmres_restart {
            opts.gmres_restart = v;
        }
        if let Some(m) = &solver.linear_method {
            opts.linear_method = match m.as_str() {
                "auto" => LinearMethod::Auto,
                "dense-lu" => LinearMethod::DenseLu,
                "gmres" => LinearMethod::Gmres,
                other => return Err(CliError::Usage(format!("unknown linear method `{other}`"))),
            };
        }
        opts.quadrature_degree = solver.quadrature_degree;
        opts.validate()?;

        let dmp = match dmp {
            Some(d) => DmpParams { p: d.p, r: d.r, lambda_star: d.lambda_star, alpha_exponent: d.alpha_exponent },
            None => DmpParams::default(),
        };

        Ok(RunConfig {
            preset,
            problem: spec,
            mesh,
            solver: opts,
            dmp,
            output: output.to_path_buf(),
            seed: problem.seed,
            samples: problem.samples,
        })
    }

    /// Creates the output directory and records the configuration in it.
    pub fn prepare_output(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.output).map_err(|e| CliError::io(&self.output, e))?;
        let path = self.output.join("run.json");
        let text = serde_json::to_string_pretty(self).map_err(dmpfem::Error::from)?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
    }
}
