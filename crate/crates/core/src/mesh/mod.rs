//! Simplicial meshes and their angle geometry.

mod angles;
mod generate;
pub(crate) mod geom;
mod io;
mod vtk;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use angles::{acuteness_audit, acuteness_audit_with, local_pairs, AngleClass, AngleReport, ANGLE_TOL};
pub use generate::{generate_structured_2d, generate_structured_3d, Pattern};
pub use geom::Point;
pub use io::MeshFile;
pub use vtk::write_vtk;

/// Cells whose measure falls below `DEGENERACY_RATIO * h_T^dim` are rejected.
pub const DEGENERACY_RATIO: f64 = 1e-14;

/// An immutable conforming triangulation (`dim = 2`) or tetrahedralization
/// (`dim = 3`).
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<usize>,
    boundary: Vec<bool>,
    boundary_nodes: Vec<usize>,
    cell_measures: Vec<f64>,
    cell_diameters: Vec<f64>,
    h: f64,
    node_cells: Vec<Vec<usize>>,
}

/// An edge shared by exactly two triangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorEdge {
    pub node_m: usize,
    pub node_n: usize,
    pub adjacent_cells: [usize; 2],
    /// Angles at the vertices opposite the edge in each adjacent cell.
    pub opposite_angles: (f64, f64),
}

/// The union of all cells sharing a vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroElement {
    pub node: usize,
    pub cells: Vec<usize>,
    pub measure: f64,
}

/// A facet key: sorted vertex indices, padded with `usize::MAX` in 2D.
type FacetKey = [usize; 3];

struct FacetIncidence {
    key: FacetKey,
    cell: usize,
    /// Local index of the cell vertex opposite the facet.
    opposite: usize,
}

impl Mesh {
    /// Builds a mesh from raw coordinates and cell connectivity. Cells with
    /// negative orientation are repaired by swapping their last two
    /// vertices.
    pub fn build(dim: usize, vertices: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("unsupported dimension {dim}")));
        }
        let mut points = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::InvalidMesh(format!("vertex {i} has {} coordinates, expected {dim}", v.len())));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
            }
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(v);
            points.push(p);
        }
        let npc = dim + 1;
        let mut flat = Vec::with_capacity(cells.len() * npc);
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != npc {
                return Err(Error::InvalidMesh(format!("cell {c} has {} vertices, expected {npc}", cell.len())));
            }
            flat.extend_from_slice(cell);
        }
        Self::from_parts(dim, points, flat)
    }

    /// Convenience constructor for triangle meshes.
    pub fn from_triangles(vertices: &[[f64; 2]], cells: &[[usize; 3]]) -> Result<Self> {
        let pts = vertices.iter().map(|v| [v[0], v[1], 0.0]).collect();
        Self::from_parts(2, pts, cells.iter().flatten().copied().collect())
    }

    /// Convenience constructor for tetrahedral meshes.
    pub fn from_tetrahedra(vertices: &[[f64; 3]], cells: &[[usize; 4]]) -> Result<Self> {
        Self::from_parts(3, vertices.to_vec(), cells.iter().flatten().copied().collect())
    }

    fn from_parts(dim: usize, vertices: Vec<Point>, mut cells: Vec<usize>) -> Result<Self> {
        let npc = dim + 1;
        let nv = vertices.len();
        let nc = cells.len() / npc;
        if nc == 0 {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }
        let mut cell_measures = Vec::with_capacity(nc);
        let mut cell_diameters = Vec::with_capacity(nc);
        for c in 0..nc {
            let cell = &mut cells[c * npc..(c + 1) * npc];
            for (a, &i) in cell.iter().enumerate() {
                if i >= nv {
                    return Err(Error::IndexOutOfRange { cell: c, index: i, count: nv });
                }
                if cell[..a].contains(&i) {
                    return Err(Error::RepeatedVertex { cell: c, vertex: i });
                }
            }
            let pts: Vec<Point> = cell.iter().map(|&i| vertices[i]).collect();
            let mut diameter: f64 = 0.0;
            for a in 0..npc {
                for b in a + 1..npc {
                    diameter = diameter.max(geom::distance(&pts[a], &pts[b]));
                }
            }
            let mut measure = geom::signed_measure(dim, &pts);
            if measure < 0.0 {
                cell.swap(npc - 2, npc - 1);
                measure = -measure;
            }
            if !(measure >= DEGENERACY_RATIO * diameter.powi(dim as i32)) {
                return Err(Error::DegenerateCell { cell: c, measure });
            }
            cell_measures.push(measure);
            cell_diameters.push(diameter);
        }

        let mut node_cells = vec![Vec::new(); nv];
        for c in 0..nc {
            for &i in &cells[c * npc..(c + 1) * npc] {
                node_cells[i].push(c);
            }
        }
        if let Some(orphan) = node_cells.iter().position(|cs| cs.is_empty()) {
            return Err(Error::OrphanVertex(orphan));
        }

        let h = cell_diameters.iter().copied().fold(0.0, f64::max);
        let mut mesh = Mesh {
            dim,
            vertices,
            cells,
            boundary: vec![false; nv],
            boundary_nodes: Vec::new(),
            cell_measures,
            cell_diameters,
            h,
            node_cells,
        };

        let facets = mesh.facet_incidences();
        for group in facets.chunk_by(|a, b| a.key == b.key) {
            match group.len() {
                1 => {
                    for &i in group[0].key.iter().take(dim) {
                        mesh.boundary[i] = true;
                    }
                }
                2 => {}
                n => return Err(Error::NonManifold { facet: group[0].key[..dim].to_vec(), count: n }),
            }
        }
        mesh.boundary_nodes = (0..nv).filter(|&i| mesh.boundary[i]).collect();
        Ok(mesh)
    }

    /// All (facet, cell) incidences sorted by facet key.
    fn facet_incidences(&self) -> Vec<FacetIncidence> {
        let npc = self.nodes_per_cell();
        let mut out = Vec::with_capacity(self.num_cells() * npc);
        for c in 0..self.num_cells() {
            let cell = self.cell(c);
            for opposite in 0..npc {
                let mut key = [usize::MAX; 3];
                let mut n = 0;
                for (a, &v) in cell.iter().enumerate() {
                    if a != opposite {
                        key[n] = v;
                        n += 1;
                    }
                }
                key[..n].sort_unstable();
                out.push(FacetIncidence { key, cell: c, opposite });
            }
        }
        out.sort_unstable_by(|a, b| a.key.cmp(&b.key).then(a.cell.cmp(&b.cell)));
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes_per_cell(&self) -> usize {
        self.dim + 1
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cell_measures.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    /// Vertex indices of cell `c`, positively oriented.
    pub fn cell(&self, c: usize) -> &[usize] {
        let npc = self.nodes_per_cell();
        &self.cells[c * npc..(c + 1) * npc]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.cells.chunks_exact(self.nodes_per_cell())
    }

    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cell(c).iter().map(|&i| self.vertices[i]).collect()
    }

    pub fn cell_measure(&self, c: usize) -> f64 {
        self.cell_measures[c]
    }

    pub fn cell_measures(&self) -> &[f64] {
        &self.cell_measures
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        self.cell_diameters[c]
    }

    /// Mesh size: the largest cell diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Total measure of the domain.
    pub fn measure(&self) -> f64 {
        crate::par::pairwise_sum(&self.cell_measures)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    /// Sorted indices of the vertices on the domain boundary.
    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    /// Cells containing `node`, in ascending order.
    pub fn node_cells(&self, node: usize) -> &[usize] {
        &self.node_cells[node]
    }

    /// Outward unit normals of the facets opposite each local vertex.
    pub fn facet_normals(&self, c: usize) -> Vec<Point> {
        let pts = self.cell_points(c);
        let npc = pts.len();
        (0..npc)
            .map(|i| {
                let others: Vec<&Point> = (0..npc).filter(|&j| j != i).map(|j| &pts[j]).collect();
                let raw = match self.dim {
                    2 => {
                        let e = geom::sub(others[1], others[0]);
                        [e[1], -e[0], 0.0]
                    }
                    _ => geom::cross(&geom::sub(others[1], others[0]), &geom::sub(others[2], others[0])),
                };
                let towards_vertex = geom::sub(&pts[i], others[0]);
                let n = if geom::dot(&raw, &towards_vertex) > 0.0 { geom::scale(&raw, -1.0) } else { raw };
                geom::scale(&n, 1.0 / geom::norm(&n))
            })
            .collect()
    }

    /// Measures (length or area) of the facets opposite each local vertex.
    pub fn facet_measures(&self, c: usize) -> Vec<f64> {
        let pts = self.cell_points(c);
        let npc = pts.len();
        (0..npc)
            .map(|i| {
                let others: Vec<&Point> = (0..npc).filter(|&j| j != i).map(|j| &pts[j]).collect();
                match self.dim {
                    2 => geom::distance(others[0], others[1]),
                    _ => {
                        0.5 * geom::norm(&geom::cross(
                            &geom::sub(others[1], others[0]),
                            &geom::sub(others[2], others[0]),
                        ))
                    }
                }
            })
            .collect()
    }

    /// Angles `α_ij = π − ∠(n(i), n(j))` for all local pairs `i < j`, in the
    /// order of [`local_pairs`]. In 2D these are the vertex angles of the
    /// triangle, in 3D the six interior dihedral angles.
    pub fn element_angles(&self, c: usize) -> Vec<f64> {
        let normals = self.facet_normals(c);
        local_pairs(self.dim)
            .iter()
            .map(|&(i, j)| std::f64::consts::PI - geom::angle_between(&normals[i], &normals[j]))
            .collect()
    }

    /// Every edge shared by two triangles, listed once with `node_m < node_n`.
    pub fn interior_edges_2d(&self) -> Result<Vec<InteriorEdge>> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.dim });
        }
        let facets = self.facet_incidences();
        let mut edges = Vec::new();
        for group in facets.chunk_by(|a, b| a.key == b.key) {
            if group.len() != 2 {
                continue;
            }
            let (m, n) = (group[0].key[0], group[0].key[1]);
            let angle_in = |inc: &FacetIncidence| {
                let k = self.vertex(self.cell(inc.cell)[inc.opposite]);
                geom::angle_between(&geom::sub(self.vertex(m), k), &geom::sub(self.vertex(n), k))
            };
            edges.push(InteriorEdge {
                node_m: m,
                node_n: n,
                adjacent_cells: [group[0].cell, group[1].cell],
                opposite_angles: (angle_in(&group[0]), angle_in(&group[1])),
            });
        }
        Ok(edges)
    }

    /// One macro element per vertex.
    pub fn macro_elements(&self) -> Vec<MacroElement> {
        (0..self.num_vertices())
            .map(|node| {
                let cells = self.node_cells[node].clone();
                let measure = cells.iter().map(|&c| self.cell_measures[c]).sum();
                MacroElement { node, cells, measure }
            })
            .collect()
    }

    /// Macro element measures `|Ω_j|` indexed by vertex.
    pub fn macro_measures(&self) -> Vec<f64> {
        self.node_cells.iter().map(|cs| cs.iter().map(|&c| self.cell_measures[c]).sum()).collect()
    }

    /// Sorted adjacency lists: vertices sharing a cell with each vertex,
    /// including the vertex itself.
    pub fn node_neighbors(&self) -> Vec<Vec<usize>> {
        self.node_cells
            .iter()
            .map(|cs| {
                let set: BTreeSet<usize> = cs.iter().flat_map(|&c| self.cell(c).iter().copied()).collect();
                set.into_iter().collect()
            })
            .collect()
    }

    /// A point at barycentric coordinates `bary` inside cell `c`.
    pub fn point_at(&self, c: usize, bary: &[f64]) -> Point {
        let mut x = [0.0; 3];
        for (&i, &b) in self.cell(c).iter().zip(bary) {
            let v = &self.vertices[i];
            for d in 0..3 {
                x[d] += b * v[d];
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn reference_triangle() -> Mesh {
        Mesh::from_triangles(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[[0, 1, 2]]).unwrap()
    }

    fn figure_pair() -> Mesh {
        // Two triangles sharing the edge A-B.
        Mesh::from_triangles(&[[0.0, 0.0], [0.2, 1.0], [-1.0, 0.3], [1.1, 0.5]], &[[0, 1, 2], [0, 3, 1]]).unwrap()
    }

    #[test]
    fn reference_triangle_geometry() {
        let m = reference_triangle();
        assert_eq!(m.cell_measure(0), 0.5);
        assert!((m.h() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.boundary_nodes(), &[0, 1, 2]);
    }

    #[test]
    fn reference_tetrahedron_geometry() {
        let m = Mesh::from_tetrahedra(
            &[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            &[[0, 1, 2, 3]],
        )
        .unwrap();
        assert!((m.cell_measure(0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((m.h() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.boundary_nodes().len(), 4);
    }

    #[test]
    fn negative_orientation_is_repaired() {
        let m = Mesh::from_triangles(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[[0, 2, 1]]).unwrap();
        assert_eq!(m.cell(0), &[0, 1, 2]);
        assert_eq!(m.cell_measure(0), 0.5);
    }

    #[test]
    fn shared_edge_topology() {
        let m = figure_pair();
        let edges = m.interior_edges_2d().unwrap();
        assert_eq!(edges.len(), 1);
        assert_eq!((edges[0].node_m, edges[0].node_n), (0, 1));
        assert_eq!(m.boundary_nodes().len(), 4);
    }

    #[test]
    fn build_errors() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!(matches!(Mesh::from_triangles(&tri, &[[0, 1, 2]]), Err(Error::DegenerateCell { .. })));
        assert!(matches!(Mesh::from_triangles(&tri, &[[0, 1, 5]]), Err(Error::IndexOutOfRange { index: 5, .. })));
        let fan = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [-1.0, 0.5]];
        assert!(matches!(
            Mesh::from_triangles(&fan, &[[0, 1, 2], [0, 3, 1], [0, 1, 4]]),
            Err(Error::NonManifold { count: 3, .. })
        ));
        assert!(matches!(
            Mesh::from_triangles(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]], &[[0, 1, 2]]),
            Err(Error::OrphanVertex(3))
        ));
    }

    #[test]
    fn degeneracy_is_scale_aware() {
        let s = 1e-6;
        let m = Mesh::from_triangles(&[[0.0, 0.0], [s, 0.0], [0.0, s]], &[[0, 1, 2]]).unwrap();
        assert!(m.cell_measure(0) > 0.0);
    }

    #[test]
    fn element_angles_of_known_triangles() {
        let a = reference_triangle().element_angles(0);
        let mut sorted = a.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - FRAC_PI_4).abs() < 1e-14);
        assert!((sorted[1] - FRAC_PI_4).abs() < 1e-14);
        assert!((sorted[2] - FRAC_PI_2).abs() < 1e-14);
        let eq = Mesh::from_triangles(&[[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]], &[[0, 1, 2]]).unwrap();
        for angle in eq.element_angles(0) {
            assert!((angle - PI / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn regular_tetrahedron_dihedral_angles() {
        let m = Mesh::from_tetrahedra(
            &[[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
            &[[0, 1, 2, 3]],
        )
        .unwrap();
        // Brute force: angle between the two faces through edge (a, b) measured
        // in the plane orthogonal to the edge.
        let p = m.cell_points(0);
        let dihedral = |a: usize, b: usize, c: usize, d: usize| {
            let e = geom::sub(&p[b], &p[a]);
            let e = geom::scale(&e, 1.0 / geom::norm(&e));
            let proj = |v: Point| {
                let v = geom::sub(&v, &p[a]);
                geom::sub(&v, &geom::scale(&e, geom::dot(&v, &e)))
            };
            geom::angle_between(&proj(p[c]), &proj(p[d]))
        };
        let brute = dihedral(0, 1, 2, 3);
        assert!((brute - (1.0f64 / 3.0).acos()).abs() < 1e-14);
        for angle in m.element_angles(0) {
            assert!((angle - brute).abs() < 1e-14);
            assert!((angle - 1.230_959_417_340_774_7).abs() < 1e-14);
        }
    }

    #[test]
    fn tetrahedron_pairs_match_edge_dihedrals() {
        // α_ij lives on the edge shared by the facets opposite i and j.
        let m = Mesh::from_tetrahedra(
            &[[0.0, 0.0, 0.0], [1.0, 0.1, 0.0], [0.2, 0.9, 0.1], [0.3, 0.2, 1.2]],
            &[[0, 1, 2, 3]],
        )
        .unwrap();
        let p = m.cell_points(0);
        let angles = m.element_angles(0);
        for (pair, &(i, j)) in local_pairs(3).iter().enumerate() {
            let edge: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
            let (a, b) = (edge[0], edge[1]);
            let e = geom::sub(&p[b], &p[a]);
            let e = geom::scale(&e, 1.0 / geom::norm(&e));
            let proj = |v: Point| {
                let v = geom::sub(&v, &p[a]);
                geom::sub(&v, &geom::scale(&e, geom::dot(&v, &e)))
            };
            let brute = geom::angle_between(&proj(p[i]), &proj(p[j]));
            assert!((angles[pair] - brute).abs() < 1e-12, "pair {pair}");
        }
    }

    #[test]
    fn minkowski_identity() {
        for m in [figure_pair(), generate_structured_3d(1, 1, 1).unwrap()] {
            for c in 0..m.num_cells() {
                let normals = m.facet_normals(c);
                let areas = m.facet_measures(c);
                let mut sum = [0.0; 3];
                for (n, a) in normals.iter().zip(&areas) {
                    for d in 0..3 {
                        sum[d] += a * n[d];
                    }
                }
                assert!(geom::norm(&sum) < 1e-12);
            }
        }
    }

    #[test]
    fn interior_edges_of_structured_mesh() {
        let m = generate_structured_2d(2, 2, Pattern::RightDiagonal, 0.0).unwrap();
        let edges = m.interior_edges_2d().unwrap();
        assert_eq!(edges.len(), 8);
        for e in &edges {
            for &c in &e.adjacent_cells {
                assert!(m.cell(c).contains(&e.node_m) && m.cell(c).contains(&e.node_n));
            }
            for angle in [e.opposite_angles.0, e.opposite_angles.1] {
                assert!(angle > 0.0 && angle < PI);
            }
        }
        assert!(reference_triangle().interior_edges_2d().unwrap().is_empty());
        assert!(matches!(
            generate_structured_3d(1, 1, 1).unwrap().interior_edges_2d(),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn opposite_angles_match_law_of_cosines() {
        let m = generate_structured_2d(3, 2, Pattern::Crisscross, 0.3).unwrap();
        for e in m.interior_edges_2d().unwrap() {
            for (s, &c) in e.adjacent_cells.iter().enumerate() {
                let k = *m.cell(c).iter().find(|&&v| v != e.node_m && v != e.node_n).unwrap();
                let a = geom::distance(m.vertex(e.node_m), m.vertex(e.node_n));
                let b = geom::distance(m.vertex(k), m.vertex(e.node_m));
                let d = geom::distance(m.vertex(k), m.vertex(e.node_n));
                let law = ((b * b + d * d - a * a) / (2.0 * b * d)).acos();
                let stored = if s == 0 { e.opposite_angles.0 } else { e.opposite_angles.1 };
                assert!((law - stored).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn macro_element_measures() {
        let tri = reference_triangle();
        for me in tri.macro_elements() {
            assert_eq!(me.measure, 0.5);
        }
        let m = generate_structured_2d(2, 2, Pattern::RightDiagonal, 0.0).unwrap();
        let centre = 4;
        let me = &m.macro_elements()[centre];
        assert_eq!(me.cells.len(), 6);
        assert_eq!(me.measure, 6.0 * 0.125);
        let total: f64 = m.macro_elements().iter().map(|e| e.measure).sum();
        assert!((total - 3.0 * m.measure()).abs() < 1e-14);
    }
}
