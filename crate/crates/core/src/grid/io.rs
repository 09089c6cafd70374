//! Mesh descriptor files.
//!
//! A mesh file is TOML:
//!
//! ```toml
//! format = "conflab-mesh"
//! version = 1
//! shape = [16, 16, 16]
//! spacing = [0.39269908169872414, 0.39269908169872414, 0.39269908169872414]
//! vertices = 4096
//!
//! [mesh]
//! topology = "torus"
//! dim = 3
//! side = 6.283185307179586
//! divisions = 16
//! ```
//!
//! Only `[mesh]` is authoritative; the mesh is rebuilt from it on read, so
//! coordinates and weights round-trip bit-exactly. `shape`, `spacing` and
//! `vertices` are checked against the rebuilt mesh.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GridManifold, MeshDescriptor};
use crate::error::{Error, Result};

pub const MESH_MAGIC: &str = "conflab-mesh";
const MESH_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct MeshFile {
    format: String,
    version: u32,
    shape: Vec<usize>,
    spacing: Vec<f64>,
    vertices: usize,
    mesh: MeshDescriptor,
}

pub fn write_mesh(path: &Path, m: &GridManifold) -> Result<()> {
    let file = MeshFile {
        format: MESH_MAGIC.into(),
        version: MESH_VERSION,
        shape: m.shape.clone(),
        spacing: m.spacing.clone(),
        vertices: m.len(),
        mesh: m.descriptor.clone(),
    };
    let text = toml::to_string(&file).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<GridManifold> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub(crate) fn parse_mesh(text: &str) -> Result<GridManifold> {
    let file: MeshFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.format != MESH_MAGIC {
        return Err(Error::Format(format!("not a mesh file (format = {:?})", file.format)));
    }
    if file.version != MESH_VERSION {
        return Err(Error::Format(format!("unsupported mesh file version {}", file.version)));
    }
    let m = file.mesh.build()?;
    if m.shape != file.shape || m.spacing != file.spacing || m.len() != file.vertices {
        return Err(Error::Format(
            "recorded shape/spacing/vertex count disagree with the mesh parameters".into(),
        ));
    }
    Ok(m)
}
