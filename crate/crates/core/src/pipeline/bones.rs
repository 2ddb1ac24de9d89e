use std::collections::HashMap;

use crate::asset::RigAsset;
use crate::error::Result;
use crate::geom::Vec3;
use crate::skeleton::{validate_forest, Bone, Skeleton, MIN_BONE_LENGTH, WORLD_UP};
use crate::skin::SkinMatrix;

/// A vertex counts toward a bone's skinning direction above this weight.
pub const INFLUENCE_THRESHOLD: f64 = 0.05;

/// Weighted centroid of the vertices each bone influences (weight > threshold).
pub fn influence_centroids(vertices: &[Vec3], skinning: &SkinMatrix, threshold: f64) -> Vec<Option<Vec3>> {
    let mut sum = vec![Vec3::zeros(); skinning.bone_count()];
    let mut mass = vec![0.0; skinning.bone_count()];
    for (v, row) in skinning.rows().iter().enumerate() {
        for &(b, w) in row {
            if w > threshold {
                sum[b] += vertices[v] * w;
                mass[b] += w;
            }
        }
    }
    sum.into_iter()
        .zip(mass)
        .map(|(s, m)| (m > 0.0).then(|| s / m))
        .collect()
}

/// Drop bones that carry no skinning weight. Children of a dropped bone are
/// handed to its nearest surviving ancestor (or become roots).
pub fn remove_unused_bones(asset: &RigAsset) -> Result<RigAsset> {
    validate_forest(&asset.skeleton).into_result()?;
    let used = asset.skinning.used_bones();
    if used.iter().all(|&u| u) || !used.iter().any(|&u| u) {
        return Ok(asset.clone());
    }
    let bones = &asset.skeleton.bones;
    let mut remap = vec![usize::MAX; bones.len()];
    let mut next = 0;
    for (b, &u) in used.iter().enumerate() {
        if u {
            remap[b] = next;
            next += 1;
        }
    }
    let surviving_ancestor = |mut p: Option<usize>| {
        while let Some(q) = p {
            if used[q] {
                return Some(remap[q]);
            }
            p = bones[q].parent;
        }
        None
    };
    let new_bones = bones
        .iter()
        .enumerate()
        .filter(|&(b, _)| used[b])
        .map(|(_, bone)| Bone::new(bone.head, bone.tail, surviving_ancestor(bone.parent)))
        .collect();
    let skeleton = Skeleton {
        joints: asset.skeleton.joints.clone(),
        bones: new_bones,
    }
    .compact_joints();
    RigAsset::new(
        asset.name.clone(),
        asset.mesh.clone(),
        skeleton,
        asset.skinning.compact_columns(&used),
    )
}

/// Repair noisy tail joints.
///
/// * A bone with exactly one child gets the child's head as its tail.
/// * A bone with several children, or none, points its tail from the head
///   toward the weighted centroid of the vertices it influences, keeping its
///   original length (the mean sibling length if that was zero).
/// * Each child not already starting at its parent's new tail is attached
///   through a new zero-weight connector bone from that tail to the child's
///   head; connectors are appended after the original bones.
///
/// The result shares joints exactly between parents and children.
pub fn correct_bones(asset: &RigAsset) -> Result<RigAsset> {
    let skel = &asset.skeleton;
    validate_forest(skel).into_result()?;
    let n = skel.bone_count();
    let children = skel.children();
    let order = skel.topological_order()?;
    let heads: Vec<Vec3> = (0..n).map(|b| skel.head(b)).collect();
    let lengths: Vec<f64> = (0..n).map(|b| skel.length(b)).collect();
    let centroids = influence_centroids(&asset.mesh.vertices, &asset.skinning, INFLUENCE_THRESHOLD);

    let fallback_length = |b: usize| {
        let nonzero_mean = |it: &mut dyn Iterator<Item = usize>| {
            let ls: Vec<f64> = it.map(|s| lengths[s]).filter(|&l| l > MIN_BONE_LENGTH).collect();
            (!ls.is_empty()).then(|| ls.iter().sum::<f64>() / ls.len() as f64)
        };
        let parent = skel.bones[b].parent;
        nonzero_mean(&mut (0..n).filter(|&s| s != b && skel.bones[s].parent == parent))
            .or_else(|| nonzero_mean(&mut (0..n)))
            .unwrap_or(0.1)
    };

    let tails: Vec<Vec3> = (0..n)
        .map(|b| {
            if let [only] = children[b][..] {
                if (heads[only] - heads[b]).norm() > MIN_BONE_LENGTH {
                    return heads[only];
                }
            }
            let length = if lengths[b] > MIN_BONE_LENGTH {
                lengths[b]
            } else {
                fallback_length(b)
            };
            let toward = |target: Vec3| {
                let d = target - heads[b];
                (d.norm() > MIN_BONE_LENGTH).then(|| d.normalize())
            };
            let dir = centroids[b]
                .and_then(toward)
                .or_else(|| toward(skel.tail(b)))
                .unwrap_or(WORLD_UP);
            heads[b] + dir * length
        })
        .collect();

    let mut joints: Vec<Vec3> = Vec::new();
    let mut new_bones = vec![Bone::new(0, 0, None); n];
    let mut tail_joint = vec![usize::MAX; n];
    let mut root_heads: HashMap<usize, usize> = HashMap::new();
    let mut connectors = Vec::new();
    let push = |joints: &mut Vec<Vec3>, p: Vec3| {
        joints.push(p);
        joints.len() - 1
    };
    for &b in &order {
        let (head, parent) = match skel.bones[b].parent {
            None => {
                let original = skel.bones[b].head;
                let j = match root_heads.get(&original) {
                    Some(&j) => j,
                    None => {
                        let j = push(&mut joints, heads[b]);
                        root_heads.insert(original, j);
                        j
                    }
                };
                (j, None)
            }
            Some(p) if (heads[b] - tails[p]).norm() <= MIN_BONE_LENGTH => (tail_joint[p], Some(p)),
            Some(p) => {
                let j = push(&mut joints, heads[b]);
                let connector = n + connectors.len();
                connectors.push(Bone::new(tail_joint[p], j, Some(p)));
                (j, Some(connector))
            }
        };
        tail_joint[b] = push(&mut joints, tails[b]);
        new_bones[b] = Bone::new(head, tail_joint[b], parent);
    }
    let extra = connectors.len();
    new_bones.extend(connectors);
    let skeleton = Skeleton {
        joints,
        bones: new_bones,
    };
    debug_assert!(validate_forest(&skeleton).is_clean(), "{:?}", validate_forest(&skeleton));
    RigAsset::new(
        asset.name.clone(),
        asset.mesh.clone(),
        skeleton,
        asset.skinning.with_extra_bones(extra),
    )
}
