use crate::asset::MeshAsset;
use crate::geom::{Aabb, Vec3};
use crate::skeleton::Skeleton;
use crate::voxel::{voxelize_in, VoxelGrid};

/// Assets with a larger fraction of joints outside the mesh are dropped.
pub const OUTSIDE_DROP_FRACTION: f64 = 0.70;

const FALLBACK_RESOLUTION: usize = 64;

// Near-axis directions; the small skew keeps rays off shared triangle edges.
const RAY_DIRECTIONS: [[f64; 3]; 3] = [
    [1.0, 3.1415926e-6, 2.7182818e-6],
    [1.4142136e-6, 1.0, 1.7320508e-6],
    [2.2360680e-6, 1.6180340e-6, 1.0],
];

/// Inside/outside classification for each point.
///
/// Crossing parity is counted along three near-axis rays; when they
/// disagree (typically an open mesh) the point is classified by a 64^3
/// solid voxelization of the mesh instead.
pub fn classify_inside(mesh: &MeshAsset, points: &[Vec3]) -> Vec<bool> {
    if mesh.faces.is_empty() {
        return vec![false; points.len()];
    }
    let mut fallback: Option<VoxelGrid> = None;
    points
        .iter()
        .map(|p| {
            let votes: Vec<bool> = RAY_DIRECTIONS
                .iter()
                .map(|d| crossing_count(mesh, p, &Vec3::new(d[0], d[1], d[2])) % 2 == 1)
                .collect();
            if votes.iter().all(|&v| v == votes[0]) {
                votes[0]
            } else {
                let grid = fallback.get_or_insert_with(|| fallback_grid(mesh));
                grid.cell_of(p).is_some_and(|c| grid.is_occupied(grid.index(c)))
            }
        })
        .collect()
}

/// Fraction of skeleton joints outside the mesh. A mesh without faces
/// encloses nothing; a skeleton without joints yields 0.
pub fn outside_fraction(skeleton: &Skeleton, mesh: &MeshAsset) -> f64 {
    if skeleton.joints.is_empty() {
        return 0.0;
    }
    let inside = classify_inside(mesh, &skeleton.joints);
    inside.iter().filter(|&&i| !i).count() as f64 / inside.len() as f64
}

fn fallback_grid(mesh: &MeshAsset) -> VoxelGrid {
    let bb = Aabb::from_points(&mesh.vertices).expect("mesh with faces has vertices");
    let r = FALLBACK_RESOLUTION as f64;
    // one empty voxel layer on each side
    let half = bb.max_half_extent().max(1e-9) * r / (r - 2.0);
    let spacing = 2.0 * half / r;
    let origin = bb.center() - Vec3::from_element(half);
    voxelize_in(mesh, FALLBACK_RESOLUTION, origin, spacing).expect("mesh has faces and resolution is valid")
}

fn crossing_count(mesh: &MeshAsset, origin: &Vec3, dir: &Vec3) -> usize {
    (0..mesh.faces.len())
        .filter(|&f| {
            let [a, b, c] = mesh.triangle(f);
            ray_hits_triangle(origin, dir, &a, &b, &c)
        })
        .count()
}

/// Moller-Trumbore ray/triangle test, counting hits strictly in front of the origin.
fn ray_hits_triangle(origin: &Vec3, dir: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> bool {
    let e1 = b - a;
    let e2 = c - a;
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-300 {
        return false;
    }
    let inv = 1.0 / det;
    let s = origin - a;
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    e2.dot(&q) * inv > 0.0
}
