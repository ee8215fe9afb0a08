//! Acuteness audit over all cells.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::par::{self, Execution};

/// Tolerance separating right angles from acute/obtuse ones.
pub const ANGLE_TOL: f64 = 1e-10;

const PAIRS_2D: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
const PAIRS_3D: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Local vertex pairs `(i, j)`, `i < j`, in the order used by every per-pair
/// report.
pub fn local_pairs(dim: usize) -> &'static [(usize, usize)] {
    if dim == 2 {
        &PAIRS_2D
    } else {
        &PAIRS_3D
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleClass {
    Acute,
    NonObtuse,
    Obtuse,
}

impl AngleClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AngleClass::Acute => "acute",
            AngleClass::NonObtuse => "non-obtuse",
            AngleClass::Obtuse => "obtuse",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AngleReport {
    /// Per cell, the angles `α_ij` in [`local_pairs`] order (radians).
    pub cell_angles: Vec<Vec<f64>>,
    pub max_angle: f64,
    pub min_angle: f64,
    pub classification: AngleClass,
    /// `min (π/2 − α_ij) / h^α`, with margins within [`ANGLE_TOL`] of zero
    /// snapped to zero.
    pub gamma_fit: f64,
    pub acute_exponent: f64,
    pub h: f64,
    /// Largest `h_T / r_T` with `r_T` the inradius. Reported only.
    pub max_shape_ratio: f64,
    /// `(cell, pair)` locations of obtuse angles.
    pub obtuse: Vec<(usize, usize)>,
}

/// Audits every angle of the mesh against the `O(h^α)`-acute condition.
pub fn acuteness_audit(mesh: &Mesh, alpha_exponent: f64) -> AngleReport {
    acuteness_audit_with(mesh, alpha_exponent, Execution::default())
}

pub fn acuteness_audit_with(mesh: &Mesh, alpha_exponent: f64, exec: Execution) -> AngleReport {
    let cell_angles = par::map_indexed(exec, mesh.num_cells(), |c| mesh.element_angles(c));
    let shape_ratios = par::map_indexed(exec, mesh.num_cells(), |c| {
        let facets: f64 = mesh.facet_measures(c).iter().sum();
        let inradius = mesh.dim() as f64 * mesh.cell_measure(c) / facets;
        mesh.cell_diameter(c) / inradius
    });
    let mut max_angle = f64::NEG_INFINITY;
    let mut min_angle = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut obtuse = Vec::new();
    for (c, angles) in cell_angles.iter().enumerate() {
        for (p, &a) in angles.iter().enumerate() {
            max_angle = max_angle.max(a);
            min_angle = min_angle.min(a);
            let margin = FRAC_PI_2 - a;
            min_margin = min_margin.min(if margin.abs() <= ANGLE_TOL { 0.0 } else { margin });
            if a > FRAC_PI_2 + ANGLE_TOL {
                obtuse.push((c, p));
            }
        }
    }
    let classification = if max_angle > FRAC_PI_2 + ANGLE_TOL {
        AngleClass::Obtuse
    } else if max_angle < FRAC_PI_2 - ANGLE_TOL {
        AngleClass::Acute
    } else {
        AngleClass::NonObtuse
    };
    AngleReport {
        cell_angles,
        max_angle,
        min_angle,
        classification,
        gamma_fit: min_margin / mesh.h().powf(alpha_exponent),
        acute_exponent: alpha_exponent,
        h: mesh.h(),
        max_shape_ratio: shape_ratios.into_iter().fold(0.0, f64::max),
        obtuse,
    }
}
