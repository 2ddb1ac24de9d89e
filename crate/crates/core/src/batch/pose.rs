use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::skeleton::Pose;

/// One bone's local transform: a rotation of `angle_rad` about `axis`
/// followed by `translation`, both in the bone's rest frame.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PoseEntry {
    pub bone_idx: usize,
    pub axis: [f64; 3],
    pub angle_rad: f64,
    pub translation: [f64; 3],
}

/// Parse a pose file: a JSON list with exactly one entry per bone.
pub fn parse_pose_json(bytes: &[u8], bone_count: usize) -> Result<Pose> {
    let entries: Vec<PoseEntry> = serde_json::from_slice(bytes)?;
    if entries.len() != bone_count {
        return Err(Error::InvalidPose(format!(
            "{} pose entries for {bone_count} bones",
            entries.len()
        )));
    }
    let mut seen = vec![false; bone_count];
    let mut pose = Pose::identity(bone_count);
    for e in entries {
        if e.bone_idx >= bone_count {
            return Err(Error::InvalidPose(format!("bone index {} out of range", e.bone_idx)));
        }
        if std::mem::replace(&mut seen[e.bone_idx], true) {
            return Err(Error::InvalidPose(format!("bone {} posed twice", e.bone_idx)));
        }
        let [ax, ay, az] = e.axis;
        let [tx, ty, tz] = e.translation;
        let m = Pose::axis_angle(Vec3::new(ax, ay, az), e.angle_rad, Vec3::new(tx, ty, tz))?;
        pose.set(e.bone_idx, m)?;
    }
    Ok(pose)
}
