//! Canonical in-memory assets.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::io::{parse_mesh_obj, parse_rig_json};
use crate::skeleton::Skeleton;
use crate::skin::SkinMatrix;

/// Triangle mesh. Faces index into `vertices` and never repeat an index.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshAsset {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

impl MeshAsset {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = MeshAsset { vertices, faces };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (f, face) in self.faces.iter().enumerate() {
            if let Some(&bad) = face.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidMesh(format!(
                    "face {f} references vertex {bad}, mesh has {n}"
                )));
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(Error::InvalidMesh(format!(
                    "face {f} repeats a vertex index: {face:?}"
                )));
            }
        }
        if let Some(v) = self.vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidMesh(format!("vertex {v} is not finite")));
        }
        Ok(())
    }

    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }
}

/// A mesh with its skeleton and per-vertex skinning weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RigAsset {
    pub name: String,
    pub mesh: MeshAsset,
    pub skeleton: Skeleton,
    pub skinning: SkinMatrix,
}

impl RigAsset {
    /// Checks that weight rows match vertices and columns match bones.
    pub fn new(name: impl Into<String>, mesh: MeshAsset, skeleton: Skeleton, skinning: SkinMatrix) -> Result<Self> {
        if skeleton.bones.is_empty() {
            return Err(Error::InvalidSkeleton("rig has no bones".into()));
        }
        if skinning.vertex_count() != mesh.vertices.len() {
            return Err(Error::Dimension(format!(
                "{} weight rows for {} vertices",
                skinning.vertex_count(),
                mesh.vertices.len()
            )));
        }
        if skinning.bone_count() != skeleton.bone_count() {
            return Err(Error::Dimension(format!(
                "{} weight columns for {} bones",
                skinning.bone_count(),
                skeleton.bone_count()
            )));
        }
        Ok(RigAsset {
            name: name.into(),
            mesh,
            skeleton,
            skinning,
        })
    }

    /// Load an OBJ mesh and a Rig-JSON file. The asset is named after the mesh file stem.
    pub fn load(mesh_path: &Path, rig_path: &Path) -> Result<Self> {
        let mesh_bytes = std::fs::read(mesh_path).map_err(|e| Error::io(mesh_path, e))?;
        let rig_bytes = std::fs::read(rig_path).map_err(|e| Error::io(rig_path, e))?;
        let mesh = parse_mesh_obj(&mesh_bytes)?;
        let (skeleton, skinning) = parse_rig_json(&rig_bytes)?;
        let name = mesh_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        RigAsset::new(name, mesh, skeleton, skinning)
    }
}
