//! Geodesic-voxel skinning baseline.
//!
//! The mesh is voxelized, every bone segment is rasterized into the solid,
//! and each surface point gets the shortest 6-connected path length through
//! occupied voxels to every bone. Weights fall off as `(d + eps)^-p`, are
//! normalized, truncated to the fewest bones covering 99% of the mass, and
//! renormalized.

use std::collections::VecDeque;

use crate::asset::MeshAsset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{closest_on_segment, Vec3};
use crate::pipeline::normalization_of;
use crate::skeleton::Skeleton;
use crate::skin::SkinMatrix;
use crate::voxel::{voxelize, VoxelGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoSkinParams {
    pub resolution: usize,
    /// Falloff exponent `p`.
    pub falloff: f64,
    /// Cumulative weight mass kept per point before renormalizing.
    pub keep_mass: f64,
}

impl Default for GeoSkinParams {
    fn default() -> Self {
        GeoSkinParams {
            resolution: 64,
            falloff: 2.0,
            keep_mass: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoSkinOutput {
    pub weights: SkinMatrix,
    /// Points whose voxel reached no bone; these used Euclidean distances.
    pub euclidean_fallback: Vec<usize>,
}

/// Breadth-first path lengths (in voxel steps) from `sources` through
/// occupied voxels. Unreachable voxels hold `u32::MAX`.
pub fn distance_field(grid: &VoxelGrid, sources: &[usize]) -> Vec<u32> {
    let mut dist = vec![u32::MAX; grid.len()];
    let mut queue = VecDeque::with_capacity(sources.len());
    for &s in sources {
        if grid.is_occupied(s) && dist[s] == u32::MAX {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(idx) = queue.pop_front() {
        let next = dist[idx] + 1;
        for n in grid.neighbors(idx) {
            if grid.is_occupied(n) && dist[n] == u32::MAX {
                dist[n] = next;
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Clone of `grid` with every bone segment marked occupied, plus each bone's voxels.
pub fn rasterize_bones(grid: &VoxelGrid, skeleton: &Skeleton) -> (VoxelGrid, Vec<Vec<usize>>) {
    let mut grid = grid.clone();
    let cells: Vec<Vec<usize>> = (0..skeleton.bone_count())
        .map(|b| grid.rasterize_segment(&skeleton.head(b), &skeleton.tail(b)))
        .collect();
    for &c in cells.iter().flatten() {
        grid.set_occupied(c, true);
    }
    (grid, cells)
}

/// Voxel used for a surface point: its own voxel if occupied, else the
/// nearest occupied voxel among the 26 around it (lowest index on ties).
pub fn point_voxel(grid: &VoxelGrid, p: &Vec3) -> Option<usize> {
    let c = grid.cell_of_clamped(p);
    let own = grid.index(c);
    if grid.is_occupied(own) {
        return Some(own);
    }
    let r = grid.resolution() as i64;
    let mut best: Option<(f64, usize)> = None;
    for di in -1i64..=1 {
        for dj in -1i64..=1 {
            for dk in -1i64..=1 {
                let n = [c[0] as i64 + di, c[1] as i64 + dj, c[2] as i64 + dk];
                if n.iter().any(|&x| x < 0 || x >= r) {
                    continue;
                }
                let n = [n[0] as usize, n[1] as usize, n[2] as usize];
                let idx = grid.index(n);
                if !grid.is_occupied(idx) {
                    continue;
                }
                let d = (grid.center(n) - p).norm_squared();
                if best.is_none_or(|(bd, bi)| d < bd || (d == bd && idx < bi)) {
                    best = Some((d, idx));
                }
            }
        }
    }
    best.map(|b| b.1)
}

/// Inverse-distance weights for one point, truncated at `keep_mass`.
/// Infinite distances get zero weight. Returns sorted `(bone, weight)` pairs.
pub fn weights_from_distances(distances: &[f64], epsilon: f64, falloff: f64, keep_mass: f64) -> Vec<(usize, f64)> {
    let raw: Vec<f64> = distances
        .iter()
        .map(|&d| if d.is_finite() { (d + epsilon).powf(-falloff) } else { 0.0 })
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Vec::new();
    }
    let mut ranked: Vec<(usize, f64)> = raw
        .iter()
        .enumerate()
        .filter(|e| *e.1 > 0.0)
        .map(|(b, &w)| (b, w / total))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut kept = Vec::new();
    let mut mass = 0.0;
    for (b, w) in ranked {
        kept.push((b, w));
        mass += w;
        if mass >= keep_mass {
            break;
        }
    }
    kept.sort_by_key(|e| e.0);
    for e in &mut kept {
        e.1 /= mass;
    }
    kept
}

/// Per-point, per-bone geodesic distances in world units.
///
/// Returns the distance table (`f64::INFINITY` where a bone is unreachable)
/// and the points that reached no bone, whose rows hold Euclidean distances
/// to the bone segments instead.
pub fn geodesic_distances(
    grid: &VoxelGrid,
    skeleton: &Skeleton,
    points: &[Vec3],
    exec: Execution,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let (solid, bone_cells) = rasterize_bones(grid, skeleton);
    let h = solid.spacing();
    let point_cells: Vec<Option<usize>> = points.iter().map(|p| point_voxel(&solid, p)).collect();
    let per_bone: Vec<Vec<f64>> = exec.map(&bone_cells, |cells| {
        let field = distance_field(&solid, cells);
        point_cells
            .iter()
            .map(|c| match c {
                Some(c) if field[*c] != u32::MAX => field[*c] as f64 * h,
                _ => f64::INFINITY,
            })
            .collect()
    });
    let mut fallback = Vec::new();
    let table = (0..points.len())
        .map(|i| {
            let row: Vec<f64> = per_bone.iter().map(|d| d[i]).collect();
            if row.iter().all(|d| d.is_infinite()) {
                fallback.push(i);
                (0..skeleton.bone_count())
                    .map(|b| {
                        let q = closest_on_segment(&points[i], &skeleton.head(b), &skeleton.tail(b));
                        (points[i] - q).norm()
                    })
                    .collect()
            } else {
                row
            }
        })
        .collect();
    (table, fallback)
}

/// Skinning weights for `points` from a voxelized solid.
pub fn geodesic_weights(
    grid: &VoxelGrid,
    skeleton: &Skeleton,
    points: &[Vec3],
    params: &GeoSkinParams,
    exec: Execution,
) -> Result<GeoSkinOutput> {
    if skeleton.bone_count() == 0 {
        return Err(Error::InvalidSkeleton("no bones to skin against".into()));
    }
    if !(params.falloff > 0.0) {
        return Err(Error::InvalidArgument(format!("falloff {} must be positive", params.falloff)));
    }
    let (table, fallback) = geodesic_distances(grid, skeleton, points, exec);
    let epsilon = 0.5 * grid.spacing();
    let rows = table
        .iter()
        .map(|d| weights_from_distances(d, epsilon, params.falloff, params.keep_mass))
        .collect();
    Ok(GeoSkinOutput {
        weights: SkinMatrix::from_rows(skeleton.bone_count(), rows)?,
        euclidean_fallback: fallback,
    })
}

/// Skin a mesh's own vertices. Mesh and skeleton are normalized to
/// `[-1, 1]^3` together before voxelizing; weights are scale-free.
pub fn skin_mesh(mesh: &MeshAsset, skeleton: &Skeleton, params: &GeoSkinParams, exec: Execution) -> Result<GeoSkinOutput> {
    let (center, scale) = normalization_of(mesh)?;
    let map = |p: &Vec3| (p - center) * scale;
    let normalized = MeshAsset {
        vertices: mesh.vertices.iter().map(map).collect(),
        faces: mesh.faces.clone(),
    };
    let skel = Skeleton {
        joints: skeleton.joints.iter().map(map).collect(),
        bones: skeleton.bones.clone(),
    };
    let grid = voxelize(&normalized, params.resolution)?;
    geodesic_weights(&grid, &skel, &normalized.vertices, params, exec)
}
