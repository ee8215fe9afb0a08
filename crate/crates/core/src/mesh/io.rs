//! JSON mesh files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::{Error, Result};

/// On-disk mesh layout. `boundary_nodes` is optional; when given it must
/// match the boundary derived from the cells.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshFile {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_nodes: Option<Vec<usize>>,
}

impl From<&Mesh> for MeshFile {
    fn from(mesh: &Mesh) -> Self {
        MeshFile {
            dim: mesh.dim(),
            vertices: mesh.vertices().iter().map(|p| p[..mesh.dim()].to_vec()).collect(),
            cells: mesh.cells().map(<[usize]>::to_vec).collect(),
            boundary_nodes: Some(mesh.boundary_nodes().to_vec()),
        }
    }
}

impl TryFrom<MeshFile> for Mesh {
    type Error = Error;

    fn try_from(file: MeshFile) -> Result<Mesh> {
        let mesh = Mesh::build(file.dim, file.vertices, file.cells)?;
        if let Some(mut given) = file.boundary_nodes {
            given.sort_unstable();
            given.dedup();
            let derived = mesh.boundary_nodes();
            if let Some(i) = given.iter().zip(derived).position(|(a, b)| a != b) {
                return Err(Error::BoundaryMismatch(given[i].min(derived[i])));
            }
            if given.len() != derived.len() {
                let longer = if given.len() > derived.len() { &given } else { derived };
                return Err(Error::BoundaryMismatch(longer[given.len().min(derived.len())]));
            }
        }
        Ok(mesh)
    }
}

impl Mesh {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&MeshFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Mesh> {
        serde_json::from_str::<MeshFile>(text)?.try_into()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Mesh> {
        Mesh::from_json(&fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
