//! Structured meshes of the unit square and unit cube.

use std::str::FromStr;

use super::Mesh;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Each lattice square split along the diagonal from lower-left to
    /// upper-right.
    RightDiagonal,
    /// Each lattice square split into four triangles through its centre.
    Crisscross,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right-diagonal" => Ok(Pattern::RightDiagonal),
            "crisscross" => Ok(Pattern::Crisscross),
            other => Err(Error::InvalidParameter(format!("unknown pattern `{other}`"))),
        }
    }
}

/// Triangulates an `nx × ny` lattice over the unit square. A nonzero `skew`
/// shears the lattice, `x ↦ x + skew · y`, which keeps cell areas but makes
/// the right angles obtuse.
pub fn generate_structured_2d(nx: usize, ny: usize, pattern: Pattern, skew: f64) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidParameter("nx and ny must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&skew) {
        return Err(Error::InvalidParameter(format!("skew {skew} outside [0, 1)")));
    }
    let point = |x: f64, y: f64| [x + skew * y, y, 0.0];
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) + nx * ny);
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(point(i as f64 / nx as f64, j as f64 / ny as f64));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            match pattern {
                Pattern::RightDiagonal => {
                    cells.extend_from_slice(&[v00, v10, v11, v00, v11, v01]);
                }
                Pattern::Crisscross => {
                    let centre = vertices.len();
                    vertices.push(point((i as f64 + 0.5) / nx as f64, (j as f64 + 0.5) / ny as f64));
                    cells.extend_from_slice(&[v00, v10, centre, v10, v11, centre, v11, v01, centre, v01, v00, centre]);
                }
            }
        }
    }
    Mesh::from_parts(2, vertices, cells)
}

/// Kuhn subdivision of an `nx × ny × nz` lattice over the unit cube: every
/// lattice cube is split into six tetrahedra around its main diagonal.
pub fn generate_structured_3d(nx: usize, ny: usize, nz: usize) -> Result<Mesh> {
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidParameter("nx, ny and nz must be at least 1".into()));
    }
    let n = [nx, ny, nz];
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([i as f64 / nx as f64, j as f64 / ny as f64, k as f64 / nz as f64]);
            }
        }
    }
    let id = |c: [usize; 3]| (c[2] * (ny + 1) + c[1]) * (nx + 1) + c[0];
    const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(24 * nx * ny * nz);
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                for perm in PERMUTATIONS {
                    let mut corner = [i, j, k];
                    cells.push(id(corner));
                    for axis in perm {
                        corner[axis] += 1;
                        cells.push(id(corner));
                    }
                }
            }
        }
    }
    Mesh::from_parts(3, vertices, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::geom;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn single_square() {
        let m = generate_structured_2d(1, 1, Pattern::RightDiagonal, 0.0).unwrap();
        assert_eq!(m.num_cells(), 2);
        for c in 0..2 {
            let mut a = m.element_angles(c);
            a.sort_by(f64::total_cmp);
            assert!((a[0] - FRAC_PI_4).abs() < 1e-14);
            assert!((a[1] - FRAC_PI_4).abs() < 1e-14);
            assert!((a[2] - FRAC_PI_2).abs() < 1e-14);
        }
    }

    #[test]
    fn counts() {
        let m = generate_structured_2d(4, 4, Pattern::RightDiagonal, 0.0).unwrap();
        assert_eq!((m.num_cells(), m.num_vertices()), (32, 25));
        let max = (0..m.num_cells()).flat_map(|c| m.element_angles(c)).fold(0.0, f64::max);
        assert!((max - FRAC_PI_2).abs() < 1e-14);
        let x = generate_structured_2d(3, 2, Pattern::Crisscross, 0.0).unwrap();
        assert_eq!((x.num_cells(), x.num_vertices()), (24, 12 + 6));
        assert!((x.measure() - 1.0).abs() < 1e-14);
        assert_eq!(x.boundary_nodes().len(), 10);
    }

    #[test]
    fn skew_creates_obtuse_angles() {
        let m = generate_structured_2d(2, 2, Pattern::RightDiagonal, 0.6).unwrap();
        // Brute-force vertex angles from edge vectors.
        let mut max: f64 = 0.0;
        for c in 0..m.num_cells() {
            let p = m.cell_points(c);
            for a in 0..3 {
                let (b, d) = ((a + 1) % 3, (a + 2) % 3);
                let u = geom::sub(&p[b], &p[a]);
                let v = geom::sub(&p[d], &p[a]);
                max = max.max((geom::dot(&u, &v) / (geom::norm(&u) * geom::norm(&v))).acos());
            }
        }
        assert!(max > FRAC_PI_2 + 0.1);
        assert!((m.measure() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kuhn_counts() {
        let m = generate_structured_3d(1, 1, 1).unwrap();
        assert_eq!((m.num_cells(), m.num_vertices()), (6, 8));
        let m = generate_structured_3d(2, 1, 1).unwrap();
        assert_eq!((m.num_cells(), m.num_vertices()), (12, 12));
        let m = generate_structured_3d(2, 2, 2).unwrap();
        assert_eq!(m.num_cells(), 48);
        assert!((m.measure() - 1.0).abs() < 1e-14);
        assert_eq!(m.boundary_nodes().len(), 26);
    }

    #[test]
    fn kuhn_dihedral_angles() {
        let m = generate_structured_3d(1, 1, 1).unwrap();
        let allowed = [FRAC_PI_4, PI / 3.0, FRAC_PI_2];
        for c in 0..m.num_cells() {
            for a in m.element_angles(c) {
                assert!(a <= FRAC_PI_2 + 1e-10);
                assert!(allowed.iter().any(|&t| (a - t).abs() < 1e-12), "{a}");
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(generate_structured_2d(0, 1, Pattern::RightDiagonal, 0.0).is_err());
        assert!(generate_structured_2d(1, 1, Pattern::RightDiagonal, 1.0).is_err());
        assert!(generate_structured_3d(1, 0, 1).is_err());
        assert!("diagonal".parse::<Pattern>().is_err());
    }
}
