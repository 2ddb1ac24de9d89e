use crate::asset::{MeshAsset, RigAsset};
use crate::error::{Error, Result};
use crate::geom::{Aabb, Vec3};

/// Center and uniform scale that map the mesh's bounding box into `[-1, 1]^3`
/// with the largest half-extent equal to 1.
pub fn normalization_of(mesh: &MeshAsset) -> Result<(Vec3, f64)> {
    let bb = Aabb::from_points(&mesh.vertices).ok_or(Error::Empty("mesh has no vertices"))?;
    let half = bb.max_half_extent();
    if !(half > 1e-12) {
        return Err(Error::Degenerate("mesh bounding box has zero extent".into()));
    }
    Ok((bb.center(), 1.0 / half))
}

/// Apply the mesh normalization to mesh vertices and joints alike.
pub fn normalize_asset(asset: &RigAsset) -> Result<RigAsset> {
    let (center, scale) = normalization_of(&asset.mesh)?;
    let map = |p: &Vec3| (p - center) * scale;
    let mut out = asset.clone();
    out.mesh.vertices.iter_mut().for_each(|p| *p = map(p));
    out.skeleton.joints.iter_mut().for_each(|p| *p = map(p));
    Ok(out)
}
