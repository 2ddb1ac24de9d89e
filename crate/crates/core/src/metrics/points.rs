use serde::Serialize;

use super::{emd, squared_distances};
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Distance under which a joint counts as matched.
pub const JOINT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointEval {
    pub cd: f64,
    pub emd: f64,
    pub precision: f64,
    pub recall: f64,
    pub threshold: f64,
}

fn check_nonempty(pred: &[Vec3], gt: &[Vec3]) -> Result<()> {
    if pred.is_empty() {
        return Err(Error::Empty("predicted joint set"));
    }
    if gt.is_empty() {
        return Err(Error::Empty("ground-truth joint set"));
    }
    Ok(())
}

/// Mean nearest squared distance pred->gt plus the same gt->pred.
pub fn chamfer(pred: &[Vec3], gt: &[Vec3]) -> Result<f64> {
    check_nonempty(pred, gt)?;
    let d = squared_distances(pred, gt);
    let forward: f64 = d.iter().map(|row| row.iter().copied().fold(f64::INFINITY, f64::min)).sum();
    let backward: f64 = (0..gt.len())
        .map(|j| d.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min))
        .sum();
    Ok(forward / pred.len() as f64 + backward / gt.len() as f64)
}

/// Precision: predicted joints with a ground-truth joint within `threshold`.
/// Recall: ground-truth joints with a predicted joint within `threshold`.
pub fn joint_pr(pred: &[Vec3], gt: &[Vec3], threshold: f64) -> Result<(f64, f64)> {
    check_nonempty(pred, gt)?;
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold {threshold} must be positive")));
    }
    let within = |p: &Vec3, set: &[Vec3]| set.iter().any(|q| (p - q).norm() <= threshold);
    let hit_p = pred.iter().filter(|p| within(p, gt)).count();
    let hit_g = gt.iter().filter(|g| within(g, pred)).count();
    Ok((hit_p as f64 / pred.len() as f64, hit_g as f64 / gt.len() as f64))
}

pub fn evaluate_joints(pred: &[Vec3], gt: &[Vec3], threshold: f64) -> Result<JointEval> {
    let (precision, recall) = joint_pr(pred, gt, threshold)?;
    Ok(JointEval {
        cd: chamfer(pred, gt)?,
        emd: emd(pred, gt)?,
        precision,
        recall,
        threshold,
    })
}
