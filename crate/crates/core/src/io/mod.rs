//! File formats: Wavefront OBJ meshes and Rig-JSON skeletons with weights.

mod obj;
mod rig_json;

pub use obj::{parse_mesh_obj, write_mesh_obj};
pub use rig_json::{parse_rig_json, write_rig_json, BoneRecord, RigDocument};
