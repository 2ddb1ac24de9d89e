//! Skeleton rigging toolkit.
//!
//! Covers the rig and skinning data model, rest-pose kinematics and linear
//! blend skinning, an asset-processing pipeline for rigged meshes, a
//! geodesic-voxel skinning baseline, joint post-processing, and evaluation
//! metrics for joints, connectivity and skinning weights.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default). Every such entry point takes an [`Execution`] so callers
//! can force the sequential path; results are identical either way.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asset;
pub mod batch;
pub mod error;
pub mod exec;
pub mod geom;
pub mod geoskin;
pub mod io;
pub mod joints;
pub mod lbs;
pub mod metrics;
pub mod pipeline;
pub mod skeleton;
pub mod skin;
pub mod voxel;

pub use asset::{MeshAsset, RigAsset};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geom::{Mat3, Mat4, Vec3};
pub use skeleton::{
    decode_connectivity, forward_kinematics, rest_pose, skeleton_to_connectivity,
    validate_forest, Bone, ConnectivityMatrix, Pose, RestPose, Skeleton, ValidationReport,
};
pub use skin::SkinMatrix;
