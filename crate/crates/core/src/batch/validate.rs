use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{parse_mesh_obj, RigDocument};
use crate::skeleton::{validate_forest, Issue};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    pub bone_count: usize,
    pub joint_count: usize,
    pub issues: Vec<Issue>,
    /// Problems outside the skeleton: mesh parsing, weights, dimensions.
    pub errors: Vec<String>,
    /// No errors of any kind.
    pub usable: bool,
    /// Usable and free of warnings.
    pub clean: bool,
}

/// Check a rig file, and optionally its mesh, without rejecting on the first problem.
///
/// Fails only when the rig file cannot be read or is not Rig-JSON at all.
pub fn validate_files(rig_path: &Path, mesh_path: Option<&Path>) -> Result<ValidationSummary> {
    let bytes = std::fs::read(rig_path).map_err(|e| Error::io(rig_path, e))?;
    let doc: RigDocument = serde_json::from_slice(&bytes)?;
    let skeleton = doc.skeleton();
    let report = validate_forest(&skeleton);
    let mut errors = Vec::new();
    if doc.bones.is_empty() {
        errors.push("rig has no bones".to_string());
    }
    let mut vertex_count = None;
    if let Some(path) = mesh_path {
        match std::fs::read(path).map_err(|e| Error::io(path, e)).and_then(|b| parse_mesh_obj(&b)) {
            Ok(mesh) => vertex_count = Some(mesh.vertices.len()),
            Err(e) => errors.push(format!("mesh: {e}")),
        }
    }
    let rows = vertex_count.unwrap_or_else(|| doc.weights.iter().map(|w| w.0 + 1).max().unwrap_or(0));
    if let Err(e) = crate::skin::SkinMatrix::from_triplets(rows, skeleton.bone_count(), doc.weights.clone()) {
        errors.push(format!("weights: {e}"));
    }
    let usable = report.is_usable() && errors.is_empty();
    Ok(ValidationSummary {
        vertex_count,
        bone_count: skeleton.bone_count(),
        joint_count: skeleton.joint_count(),
        clean: usable && report.is_clean(),
        usable,
        issues: report.issues,
        errors,
    })
}
