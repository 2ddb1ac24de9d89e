use serde::Serialize;

use super::inside::{outside_fraction, OUTSIDE_DROP_FRACTION};
use crate::asset::RigAsset;

pub const MIN_VERTICES_EXCLUSIVE: usize = 128;
pub const MAX_VERTICES_EXCLUSIVE: usize = 65_535;
pub const MIN_BONES_EXCLUSIVE: usize = 8;
pub const MAX_BONES_EXCLUSIVE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterRule {
    VertexCount,
    BoneCount,
    OutsideMesh,
}

impl FilterRule {
    pub fn id(self) -> &'static str {
        match self {
            FilterRule::VertexCount => "vertex-count",
            FilterRule::BoneCount => "bone-count",
            FilterRule::OutsideMesh => "outside-mesh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Keep,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterReason {
    pub rule: FilterRule,
    /// The measured value that violated the rule.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterReport {
    pub decision: Decision,
    pub reasons: Vec<FilterReason>,
}

impl FilterReport {
    pub fn keep(&self) -> bool {
        self.decision == Decision::Keep
    }
}

/// Bounds are strict on both sides; the asset is dropped when more than 70%
/// of joints lie outside the mesh.
pub fn filter_counts(vertex_count: usize, bone_count: usize, outside: f64) -> FilterReport {
    let mut reasons = Vec::new();
    if !(MIN_VERTICES_EXCLUSIVE < vertex_count && vertex_count < MAX_VERTICES_EXCLUSIVE) {
        reasons.push(FilterReason {
            rule: FilterRule::VertexCount,
            value: vertex_count as f64,
        });
    }
    if !(MIN_BONES_EXCLUSIVE < bone_count && bone_count < MAX_BONES_EXCLUSIVE) {
        reasons.push(FilterReason {
            rule: FilterRule::BoneCount,
            value: bone_count as f64,
        });
    }
    if outside > OUTSIDE_DROP_FRACTION {
        reasons.push(FilterReason {
            rule: FilterRule::OutsideMesh,
            value: outside,
        });
    }
    let decision = if reasons.is_empty() {
        Decision::Keep
    } else {
        Decision::Drop
    };
    FilterReport { decision, reasons }
}

pub fn filter_asset(asset: &RigAsset) -> FilterReport {
    let outside = outside_fraction(&asset.skeleton, &asset.mesh);
    filter_counts(asset.mesh.vertices.len(), asset.skeleton.bone_count(), outside)
}
