//! Dirichlet boundary data.

use crate::mesh::{Mesh, Point};
use crate::solver::SparseSystem;
use crate::{Error, Result};

/// Prescribed values, `None` at unconstrained nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValues {
    pub values: Vec<Option<f64>>,
}

impl BoundaryValues {
    /// Nodal vector with the prescribed values and `fill` elsewhere.
    pub fn extend(&self, fill: f64) -> Vec<f64> {
        self.values.iter().map(|v| v.unwrap_or(fill)).collect()
    }
}

/// Nodal interpolation of `g` at the boundary vertices.
pub fn interpolate_boundary(mesh: &Mesh, g: impl Fn(&Point) -> f64) -> BoundaryValues {
    let mut values = vec![None; mesh.num_vertices()];
    for &node in mesh.boundary_nodes() {
        values[node] = Some(g(mesh.vertex(node)));
    }
    BoundaryValues { values }
}

/// Replaces constrained rows by identity rows and moves known values of
/// constrained columns to the right-hand side of the remaining rows.
pub fn apply_dirichlet(mut system: SparseSystem, mesh: &Mesh, bc: &BoundaryValues) -> Result<SparseSystem> {
    let n = system.matrix.n();
    if bc.values.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: bc.values.len() });
    }
    if let Some(&node) = mesh.boundary_nodes().iter().find(|&&b| bc.values[b].is_none()) {
        return Err(Error::MissingBoundaryValue(node));
    }
    for i in 0..n {
        let (cols, vals) = system.matrix.row_mut(i);
        match bc.values[i] {
            Some(g) => {
                for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                    *v = if j == i { 1.0 } else { 0.0 };
                }
                system.rhs[i] = g;
            }
            None => {
                for (&j, v) in cols.iter().zip(vals.iter_mut()) {
                    if let Some(g) = bc.values[j] {
                        system.rhs[i] -= *v * g;
                        *v = 0.0;
                    }
                }
            }
        }
    }
    system.dirichlet_mask = bc.values.clone();
    Ok(system)
}
