use std::f64::consts::PI;

use crate::mesh::geom::{self, Point};
use crate::mesh::Mesh;

/// Constant per-cell data of the affine shape functions `ℓ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeData {
    pub gradients: Vec<Point>,
    pub gradient_norms: Vec<f64>,
    /// Outward unit normals of the facets opposite each vertex, computed
    /// from the facet geometry (not from the gradients).
    pub normals: Vec<Point>,
    pub measure: f64,
}

/// Gradients of the barycentric coordinates of cell `c`, obtained from the
/// inverse of the edge matrix `[x_1 − x_0, …, x_d − x_0]`.
pub fn shape_data(mesh: &Mesh, c: usize) -> ShapeData {
    let p = mesh.cell_points(c);
    let e1 = geom::sub(&p[1], &p[0]);
    let e2 = geom::sub(&p[2], &p[0]);
    let mut gradients = match mesh.dim() {
        2 => {
            let det = e1[0] * e2[1] - e1[1] * e2[0];
            vec![[0.0; 3], [e2[1] / det, -e2[0] / det, 0.0], [-e1[1] / det, e1[0] / det, 0.0]]
        }
        _ => {
            let e3 = geom::sub(&p[3], &p[0]);
            let det = geom::dot(&e1, &geom::cross(&e2, &e3));
            vec![
                [0.0; 3],
                geom::scale(&geom::cross(&e2, &e3), 1.0 / det),
                geom::scale(&geom::cross(&e3, &e1), 1.0 / det),
                geom::scale(&geom::cross(&e1, &e2), 1.0 / det),
            ]
        }
    };
    let mut g0 = [0.0; 3];
    for g in &gradients[1..] {
        for d in 0..3 {
            g0[d] -= g[d];
        }
    }
    gradients[0] = g0;
    let gradient_norms = gradients.iter().map(geom::norm).collect();
    ShapeData { gradients, gradient_norms, normals: mesh.facet_normals(c), measure: mesh.cell_measure(c) }
}

/// `α_ij = π − ∠(∇ℓ_i, ∇ℓ_j)`.
pub fn angle_from_gradients(shape: &ShapeData, i: usize, j: usize) -> f64 {
    PI - geom::angle_between(&shape.gradients[i], &shape.gradients[j])
}

/// Barycentric coordinates of `x` with respect to cell `c`.
pub fn barycentric(mesh: &Mesh, c: usize, x: &Point) -> Vec<f64> {
    let shape = shape_data(mesh, c);
    let x0 = mesh.vertex(mesh.cell(c)[0]);
    let dx = geom::sub(x, x0);
    let mut bary: Vec<f64> = shape.gradients.iter().map(|g| geom::dot(g, &dx)).collect();
    bary[0] += 1.0;
    bary
}
