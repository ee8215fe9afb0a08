//! Element integrals and global assembly of `𝔔(w; ·, ·)`.

use crate::mesh::{geom, Mesh};
use crate::p1::{shape_data, P1Field, QuadratureRule, ShapeData};
use crate::par::{self, Execution};
use crate::solver::{CoefficientSet, CsrMatrix, SparseSystem};
use crate::{Error, Result};

/// The three parts of `∫_T {a∇ℓ_i·∇ℓ_j + b·(∇ℓ_i)ℓ_j + cℓ_iℓ_j}` on one
/// cell, stored row-major with the trial index `i` first.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementIntegrals {
    pub nodes_per_cell: usize,
    pub diffusion: Vec<f64>,
    pub advection: Vec<f64>,
    pub reaction: Vec<f64>,
    /// `∫_T f ℓ_j`.
    pub load: Vec<f64>,
    pub shape: ShapeData,
}

impl ElementIntegrals {
    /// Full bracketed integral for trial `i`, test `j`.
    pub fn total(&self, i: usize, j: usize) -> f64 {
        let k = i * self.nodes_per_cell + j;
        self.diffusion[k] + self.advection[k] + self.reaction[k]
    }
}

/// Local matrix with rows indexed by the test function and the load vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSystem {
    pub nodes: Vec<usize>,
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
}

fn check_rule(mesh: &Mesh, rule: &QuadratureRule) -> Result<()> {
    if rule.dim != mesh.dim() {
        return Err(Error::DimensionMismatch { expected: mesh.dim(), found: rule.dim });
    }
    Ok(())
}

/// Integrals on cell `c` with coefficients frozen at `η = w(x_q)` and
/// `p = ∇w|_T`.
pub fn element_integrals(
    mesh: &Mesh,
    c: usize,
    w: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
) -> ElementIntegrals {
    let n = mesh.nodes_per_cell();
    let shape = shape_data(mesh, c);
    let wv = w.cell_values(c);
    let mut p = [0.0; 3];
    for (wi, g) in wv.iter().zip(&shape.gradients) {
        for d in 0..3 {
            p[d] += wi * g[d];
        }
    }
    let mut diffusion = vec![0.0; n * n];
    let mut advection = vec![0.0; n * n];
    let mut reaction = vec![0.0; n * n];
    let mut load = vec![0.0; n];
    let grad_dots: Vec<f64> = (0..n * n).map(|k| geom::dot(&shape.gradients[k / n], &shape.gradients[k % n])).collect();
    for (bary, &wq) in rule.points.iter().zip(&rule.weights) {
        let x = mesh.point_at(c, bary);
        let eta: f64 = wv.iter().zip(bary).map(|(a, b)| a * b).sum();
        let jw = wq * shape.measure;
        let a = coeffs.eval_a(&x, eta, &p);
        let f = (coeffs.f)(&x);
        for j in 0..n {
            load[j] += jw * f * bary[j];
        }
        for k in 0..n * n {
            diffusion[k] += jw * a * grad_dots[k];
        }
        if coeffs.b.is_some() {
            let b = coeffs.eval_b(&x, eta, &p);
            for i in 0..n {
                let bg = geom::dot(&b, &shape.gradients[i]);
                for j in 0..n {
                    advection[i * n + j] += jw * bg * bary[j];
                }
            }
        }
        if coeffs.c.is_some() {
            let cv = coeffs.eval_c(&x, eta);
            for i in 0..n {
                for j in 0..n {
                    reaction[i * n + j] += jw * cv * bary[i] * bary[j];
                }
            }
        }
    }
    ElementIntegrals { nodes_per_cell: n, diffusion, advection, reaction, load, shape }
}

/// Local stiffness matrix (row = test `m`, column = trial `n`) and load.
pub fn local_system(
    mesh: &Mesh,
    c: usize,
    w: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
) -> LocalSystem {
    let e = element_integrals(mesh, c, w, coeffs, rule);
    let n = e.nodes_per_cell;
    let mut matrix = vec![0.0; n * n];
    for m in 0..n {
        for t in 0..n {
            matrix[m * n + t] = e.total(t, m);
        }
    }
    LocalSystem { nodes: mesh.cell(c).to_vec(), matrix, rhs: e.load }
}

pub fn assemble_q(
    mesh: &Mesh,
    w: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
) -> Result<SparseSystem> {
    assemble_q_with(mesh, w, coeffs, rule, Execution::default())
}

/// Local systems are computed per cell (in parallel when requested) and
/// merged in ascending cell order, so the result does not depend on `exec`.
pub fn assemble_q_with(
    mesh: &Mesh,
    w: &P1Field<'_>,
    coeffs: &CoefficientSet,
    rule: &QuadratureRule,
    exec: Execution,
) -> Result<SparseSystem> {
    check_rule(mesh, rule)?;
    if w.values().len() != mesh.num_vertices() {
        return Err(Error::LengthMismatch { expected: mesh.num_vertices(), found: w.values().len() });
    }
    let mut warnings = Vec::new();
    if !coeffs.constant && rule.degree < 4 {
        warnings.push(Error::QuadratureDegreeTooLow { degree: rule.degree }.to_string());
    }
    let locals = par::map_indexed(exec, mesh.num_cells(), |c| local_system(mesh, c, w, coeffs, rule));
    let mut matrix = CsrMatrix::from_pattern(&mesh.node_neighbors());
    let mut rhs = vec![0.0; mesh.num_vertices()];
    let n = mesh.nodes_per_cell();
    for local in &locals {
        for (m, &gm) in local.nodes.iter().enumerate() {
            rhs[gm] += local.rhs[m];
            for (t, &gt) in local.nodes.iter().enumerate() {
                matrix.add(gm, gt, local.matrix[m * n + t]);
            }
        }
    }
    Ok(SparseSystem { matrix, rhs, dirichlet_mask: vec![None; mesh.num_vertices()], warnings })
}
