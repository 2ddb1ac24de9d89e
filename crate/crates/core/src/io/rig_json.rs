//! Rig-JSON: joints, bones with parent links, and sparse skinning weights.
//!
//! ```json
//! { "joints": [[x, y, z], ...],
//!   "bones":  [{"head": 0, "tail": 1, "parent": null}, ...],
//!   "weights": [[vertex, bone, weight], ...] }
//! ```
//!
//! Indices are 0-based. Only nonzero weights are stored; the vertex count is
//! one past the largest vertex index. Floats are written in shortest
//! round-trip form, so parsing recovers every value bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::skeleton::{validate_forest, Bone, Skeleton};
use crate::skin::SkinMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoneRecord {
    pub head: usize,
    pub tail: usize,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigDocument {
    pub joints: Vec<[f64; 3]>,
    pub bones: Vec<BoneRecord>,
    pub weights: Vec<(usize, usize, f64)>,
}

impl RigDocument {
    pub fn from_parts(skeleton: &Skeleton, skinning: &SkinMatrix) -> Self {
        RigDocument {
            joints: skeleton.joints.iter().map(|p| [p.x, p.y, p.z]).collect(),
            bones: skeleton
                .bones
                .iter()
                .map(|b| BoneRecord {
                    head: b.head,
                    tail: b.tail,
                    parent: b.parent,
                })
                .collect(),
            weights: skinning.triplets().collect(),
        }
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton {
            joints: self.joints.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect(),
            bones: self
                .bones
                .iter()
                .map(|b| Bone::new(b.head, b.tail, b.parent))
                .collect(),
        }
    }
}

/// Parse and validate a Rig-JSON document.
///
/// Structural skeleton errors (cycles, bad indices, zero-length bones) are
/// rejected; weight rows within 1e-6 of unit sum are renormalized.
pub fn parse_rig_json(bytes: &[u8]) -> Result<(Skeleton, SkinMatrix)> {
    let doc: RigDocument = serde_json::from_slice(bytes)?;
    if doc.bones.is_empty() {
        return Err(Error::InvalidSkeleton("rig has no bones".into()));
    }
    let skeleton = doc.skeleton();
    validate_forest(&skeleton).into_result()?;
    let vertex_count = doc.weights.iter().map(|w| w.0.saturating_add(1)).max().unwrap_or(0);
    // every vertex needs at least one stored weight
    if vertex_count > doc.weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} weight entries cannot cover {vertex_count} vertices",
            doc.weights.len()
        )));
    }
    let skinning = SkinMatrix::from_triplets(vertex_count, skeleton.bone_count(), doc.weights)?;
    Ok((skeleton, skinning))
}

pub fn write_rig_json(skeleton: &Skeleton, skinning: &SkinMatrix) -> Result<Vec<u8>> {
    if skeleton.bones.is_empty() {
        return Err(Error::InvalidSkeleton("cannot serialize a skeleton with no bones".into()));
    }
    if skinning.bone_count() != skeleton.bone_count() {
        return Err(Error::Dimension(format!(
            "{} weight columns for {} bones",
            skinning.bone_count(),
            skeleton.bone_count()
        )));
    }
    let mut out = serde_json::to_vec(&RigDocument::from_parts(skeleton, skinning))?;
    out.push(b'\n');
    Ok(out)
}
