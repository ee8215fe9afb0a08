//! Legacy ASCII VTK output.

use std::io::Write;

use super::Mesh;
use crate::{Error, Result};

const VTK_TRIANGLE: u8 = 5;
const VTK_TETRA: u8 = 10;

/// Writes the mesh as an `UNSTRUCTURED_GRID` with optional named nodal
/// (`POINT_DATA`) and per-cell (`CELL_DATA`) scalar fields.
pub fn write_vtk<W: Write>(
    mut out: W,
    mesh: &Mesh,
    point_scalars: &[(&str, &[f64])],
    cell_scalars: &[(&str, &[f64])],
) -> Result<()> {
    for (name, values) in point_scalars {
        if values.len() != mesh.num_vertices() {
            return Err(Error::LengthMismatch { expected: mesh.num_vertices(), found: values.len() });
        }
        check_name(name)?;
    }
    for (name, values) in cell_scalars {
        if values.len() != mesh.num_cells() {
            return Err(Error::LengthMismatch { expected: mesh.num_cells(), found: values.len() });
        }
        check_name(name)?;
    }
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "dmpfem mesh")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for p in mesh.vertices() {
        writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
    }
    let npc = mesh.nodes_per_cell();
    writeln!(out, "CELLS {} {}", mesh.num_cells(), mesh.num_cells() * (npc + 1))?;
    for cell in mesh.cells() {
        write!(out, "{npc}")?;
        for v in cell {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.num_cells())?;
    let kind = if mesh.dim() == 2 { VTK_TRIANGLE } else { VTK_TETRA };
    for _ in 0..mesh.num_cells() {
        writeln!(out, "{kind}")?;
    }
    write_scalars(&mut out, "POINT_DATA", mesh.num_vertices(), point_scalars)?;
    write_scalars(&mut out, "CELL_DATA", mesh.num_cells(), cell_scalars)?;
    Ok(())
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::InvalidParameter(format!("invalid VTK field name `{name}`")));
    }
    Ok(())
}

fn write_scalars<W: Write>(out: &mut W, section: &str, count: usize, fields: &[(&str, &[f64])]) -> Result<()> {
    if fields.is_empty() {
        return Ok(());
    }
    writeln!(out, "{section} {count}")?;
    for (name, values) in fields {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in *values {
            writeln!(out, "{v}")?;
        }
    }
    Ok(())
}
