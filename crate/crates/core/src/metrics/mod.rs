//! Evaluation metrics for joints, connectivity and skinning weights.

mod connectivity;
mod emd;
mod points;
mod skin;

pub use connectivity::connectivity_pr;
pub use emd::{emd, transport, TransportPlan};
pub use points::{chamfer, evaluate_joints, joint_pr, JointEval, JOINT_THRESHOLD};
pub use skin::{skin_metrics, SkinEval, CE_CLAMP, INFLUENCE_THRESHOLD};

fn squared_distances(pred: &[crate::Vec3], gt: &[crate::Vec3]) -> Vec<Vec<f64>> {
    pred.iter()
        .map(|p| gt.iter().map(|g| (p - g).norm_squared()).collect())
        .collect()
}
