//! Frozen-coefficient fixed-point iteration for `𝔔(u_h; u_h, v) = F(v)`.

use serde::{Deserialize, Serialize};

use crate::mesh::Mesh;
use crate::p1::{P1Field, QuadratureRule};
use crate::par::Execution;
use crate::solver::{
    apply_dirichlet, assemble_q_with, interpolate_boundary, linear_solve_from, BoundaryValues, CoefficientSet,
    LinearMethod, SparseSystem,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub picard_max_iter: usize,
    /// Bound on `‖u^{m+1} − u^m‖₂ / ‖u^{m+1}‖₂`.
    pub picard_tol: f64,
    pub linear_max_iter: usize,
    /// Bound on `‖Ax − b‖₂ / ‖b‖₂`.
    pub linear_tol: f64,
    pub damping: f64,
    pub gmres_restart: usize,
    pub linear_method: LinearMethod,
    /// Quadrature degree; the coefficient default is used when absent.
    pub quadrature_degree: Option<usize>,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            picard_max_iter: 100,
            picard_tol: 1e-10,
            linear_max_iter: 10_000,
            linear_tol: 1e-12,
            damping: 1.0,
            gmres_restart: 30,
            linear_method: LinearMethod::Auto,
            quadrature_degree: None,
            execution: Execution::default(),
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("picard_tol", self.picard_tol)?;
        positive("linear_tol", self.linear_tol)?;
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if self.gmres_restart == 0 {
            return Err(Error::InvalidParameter("gmres_restart must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult<'m> {
    pub u_h: P1Field<'m>,
    pub picard_iterations: usize,
    pub final_update_norm: f64,
    pub final_linear_residual: f64,
    /// `‖A(u_h)u_h − F‖₂ / ‖F‖₂` after Dirichlet elimination.
    pub galerkin_residual: f64,
    pub converged: bool,
    pub update_history: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Serializable part of a [`SolveResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub picard_iterations: usize,
    pub final_update_norm: f64,
    pub final_linear_residual: f64,
    pub galerkin_residual: f64,
    pub converged: bool,
    pub update_history: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SolveResult<'_> {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            picard_iterations: self.picard_iterations,
            final_update_norm: self.final_update_norm,
            final_linear_residual: self.final_linear_residual,
            galerkin_residual: self.galerkin_residual,
            converged: self.converged,
            update_history: self.update_history.clone(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary())?)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(system: &SparseSystem, x: &[f64]) -> f64 {
    let r = system.residual_norm(x);
    let b = norm(&system.rhs);
    if b > 0.0 {
        r / b
    } else {
        r
    }
}

/// Iterates `𝔔(u^m; u^{m+1}, v) = F(v)`, starting from `initial` (with its
/// boundary values replaced by the interpolant of `g`) or from that
/// interpolant extended by zero.
///
/// Coefficients flagged linear yield the same system at every step, so
/// their fixed point is the first solve; it is returned after one
/// iteration with a zero update and without damping.
pub fn picard_solve<'m>(
    mesh: &'m Mesh,
    coeffs: &CoefficientSet,
    opts: &SolveOptions,
    initial: Option<&[f64]>,
) -> Result<SolveResult<'m>> {
    opts.validate()?;
    let rule = match opts.quadrature_degree {
        Some(d) => QuadratureRule::new(mesh.dim(), d)?,
        None => coeffs.default_rule(mesh.dim())?,
    };
    let bc: BoundaryValues = interpolate_boundary(mesh, &*coeffs.g);
    let mut u = match initial {
        Some(init) => {
            if init.len() != mesh.num_vertices() {
                return Err(Error::LengthMismatch { expected: mesh.num_vertices(), found: init.len() });
            }
            init.iter().zip(&bc.values).map(|(&x, b)| b.unwrap_or(x)).collect()
        }
        None => bc.extend(0.0),
    };
    if opts.picard_max_iter == 0 {
        return Err(Error::PicardDiverged { iterations: 0, update: f64::INFINITY });
    }
    let assemble = |u: &[f64]| -> Result<SparseSystem> {
        let w = P1Field::new(mesh, u.to_vec())?;
        apply_dirichlet(assemble_q_with(mesh, &w, coeffs, &rule, opts.execution)?, mesh, &bc)
    };
    let mut system = assemble(&u)?;
    let warnings = system.warnings.clone();
    let mut history = Vec::new();
    for iteration in 1..=opts.picard_max_iter {
        let solution = linear_solve_from(&system, opts, Some(&u))?;
        if coeffs.linear {
            history.push(norm(&sub(&solution.x, &u)) / norm(&solution.x).max(f64::MIN_POSITIVE));
            let galerkin_residual = relative_residual(&system, &solution.x);
            return Ok(SolveResult {
                u_h: P1Field::new(mesh, solution.x)?,
                picard_iterations: 1,
                final_update_norm: 0.0,
                final_linear_residual: solution.relative_residual,
                galerkin_residual,
                converged: true,
                update_history: history,
                warnings,
            });
        }
        let next: Vec<f64> = u.iter().zip(&solution.x).map(|(a, b)| a + opts.damping * (b - a)).collect();
        let diff = norm(&sub(&next, &u));
        let scale = norm(&next);
        let update = if scale > 0.0 { diff / scale } else { diff };
        history.push(update);
        u = next;
        system = assemble(&u)?;
        if update <= opts.picard_tol {
            let galerkin_residual = relative_residual(&system, &u);
            if galerkin_residual <= 10.0 * opts.picard_tol {
                return Ok(SolveResult {
                    u_h: P1Field::new(mesh, u)?,
                    picard_iterations: iteration,
                    final_update_norm: update,
                    final_linear_residual: solution.relative_residual,
                    galerkin_residual,
                    converged: true,
                    update_history: history,
                    warnings,
                });
            }
        }
    }
    Err(Error::PicardDiverged { iterations: opts.picard_max_iter, update: history.last().copied().unwrap_or(f64::NAN) })
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
