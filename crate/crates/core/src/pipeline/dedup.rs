use crate::geom::Vec3;
use crate::metrics::chamfer;
use crate::skeleton::Skeleton;

/// Quantization step for joint signatures, in normalized units.
pub const DEDUP_CELL: f64 = 1e-3;

/// Two skeletons with the same bone count are duplicates below this
/// symmetric Chamfer distance between their joint sets.
pub const DEDUP_CHAMFER_THRESHOLD: f64 = 1e-3;

/// Bone count plus the sorted multiset of joints snapped to a `DEDUP_CELL` grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DedupKey {
    pub bone_count: usize,
    pub cells: Vec<[i64; 3]>,
}

pub fn dedup_key(skeleton: &Skeleton) -> DedupKey {
    let snap = |p: &Vec3| p.map(|c| (c / DEDUP_CELL).round() as i64);
    let mut cells: Vec<[i64; 3]> = skeleton
        .joints
        .iter()
        .map(|p| {
            let q = snap(p);
            [q.x, q.y, q.z]
        })
        .collect();
    cells.sort_unstable();
    DedupKey {
        bone_count: skeleton.bone_count(),
        cells,
    }
}

/// Exact similarity test behind the signature; both skeletons should be normalized.
pub fn is_duplicate(a: &Skeleton, b: &Skeleton) -> bool {
    if a.bone_count() != b.bone_count() {
        return false;
    }
    match chamfer(&a.joints, &b.joints) {
        Ok(cd) => cd < DEDUP_CHAMFER_THRESHOLD,
        Err(_) => a.joints.is_empty() && b.joints.is_empty(),
    }
}
