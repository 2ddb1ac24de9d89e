//! Joint extraction from volumetric score fields: Gaussian target fields,
//! thresholding, density clustering and voxel non-maximum suppression.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::Vec3;

/// Grid resolution per axis of the joint score field.
pub const FIELD_RESOLUTION: usize = 64;
/// Gaussian kernel width in voxel edges.
pub const KERNEL_VOXELS: f64 = 2.0;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_EPS: f64 = 0.05;
pub const DEFAULT_MIN_POINTS: usize = 3;
pub const NMS_CELL: f64 = 0.05;

/// Scalar values at the voxel centers of a cubic grid over `[-1, 1]^3`.
///
/// Index `(i, j, k)` maps to `(i * R + j) * R + k` where `i` runs along x.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    resolution: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(resolution: usize, values: Vec<f64>) -> Result<Self> {
        if resolution == 0 || values.len() != resolution.pow(3) {
            return Err(Error::Dimension(format!(
                "{} values for a {resolution}^3 field",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!("field value {v} outside [0, 1]")));
        }
        Ok(ScalarField { resolution, values })
    }

    pub fn zeros(resolution: usize) -> Self {
        ScalarField { resolution, values: vec![0.0; resolution.pow(3)] }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        2.0 / self.resolution as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, [i, j, k]: [usize; 3]) -> f64 {
        self.values[(i * self.resolution + j) * self.resolution + k]
    }

    pub fn center(&self, [i, j, k]: [usize; 3]) -> Vec3 {
        let h = self.spacing();
        Vec3::new(
            -1.0 + (i as f64 + 0.5) * h,
            -1.0 + (j as f64 + 0.5) * h,
            -1.0 + (k as f64 + 0.5) * h,
        )
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Target field on the default 64^3 grid.
pub fn gaussian_target_field(joints: &[Vec3]) -> Result<ScalarField> {
    gaussian_target_field_with(joints, FIELD_RESOLUTION, Execution::default())
}

/// Each grid value is the maximum Gaussian response over all joints, with a
/// kernel width of two voxel edges.
pub fn gaussian_target_field_with(joints: &[Vec3], resolution: usize, exec: Execution) -> Result<ScalarField> {
    if joints.is_empty() {
        return Err(Error::Empty("joint set"));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("field resolution must be positive".into()));
    }
    if let Some(j) = joints.iter().find(|j| !j.iter().all(|c| c.is_finite() && c.abs() <= 1.0 + 1e-9)) {
        return Err(Error::InvalidArgument(format!("joint {j:?} outside [-1, 1]^3")));
    }
    let mut field = ScalarField::zeros(resolution);
    let gamma = KERNEL_VOXELS * field.spacing();
    let denom = 2.0 * gamma * gamma;
    let template = field.clone();
    let slice = resolution * resolution;
    exec.for_each_chunk(&mut field.values, slice, |i, out| {
        for j in 0..resolution {
            for k in 0..resolution {
                let x = template.center([i, j, k]);
                let d2 = joints.iter().map(|p| (x - p).norm_squared()).fold(f64::INFINITY, f64::min);
                out[j * resolution + k] = (-d2 / denom).exp();
            }
        }
    });
    Ok(field)
}

/// Centers of grid points whose value is at least `tau`, in index order.
pub fn threshold_field(field: &ScalarField, tau: f64) -> Vec<Vec3> {
    let r = field.resolution;
    let mut out = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                if field.get([i, j, k]) >= tau {
                    out.push(field.center([i, j, k]));
                }
            }
        }
    }
    out
}

fn cell_key(p: &Vec3, size: f64, offset: f64) -> [i64; 3] {
    [
        ((p.x + offset) / size).floor() as i64,
        ((p.y + offset) / size).floor() as i64,
        ((p.z + offset) / size).floor() as i64,
    ]
}

/// Density-based clustering; returns the mean of each cluster's members.
///
/// A point is core when at least `min_points` points (itself included) lie
/// within `eps`. Clusters are numbered by their first member's index and a
/// border point joins the first cluster that reaches it. Noise is dropped.
pub fn dbscan_cluster(points: &[Vec3], eps: f64, min_points: usize) -> Vec<Vec3> {
    if points.is_empty() || !(eps > 0.0) {
        return Vec::new();
    }
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell_key(p, eps, 0.0)).or_default().push(i);
    }
    let neighbors = |i: usize| -> Vec<usize> {
        let p = points[i];
        let c = cell_key(&p, eps, 0.0);
        let mut found = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        found.extend(bucket.iter().copied().filter(|&q| (points[q] - p).norm() <= eps));
                    }
                }
            }
        }
        found.sort_unstable();
        found
    };

    let mut label: Vec<Option<usize>> = vec![None; points.len()];
    let mut visited = vec![false; points.len()];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for start in 0..points.len() {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let first = neighbors(start);
        if first.len() < min_points {
            continue;
        }
        let cluster = members.len();
        members.push(Vec::new());
        label[start] = Some(cluster);
        let mut queue: VecDeque<usize> = first.into();
        while let Some(q) = queue.pop_front() {
            if label[q].is_none() {
                label[q] = Some(cluster);
            }
            if visited[q] {
                continue;
            }
            visited[q] = true;
            let around = neighbors(q);
            if around.len() >= min_points {
                queue.extend(around);
            }
        }
    }
    for (i, l) in label.iter().enumerate() {
        if let Some(c) = l {
            members[*c].push(i);
        }
    }
    members
        .iter()
        .map(|m| m.iter().map(|&i| points[i]).sum::<Vec3>() / m.len() as f64)
        .collect()
}

/// Keep the first point of each `cell`-sized voxel, cells anchored at -1.
pub fn voxel_nms(points: &[Vec3], cell: f64) -> Vec<Vec3> {
    let mut seen = HashSet::new();
    points
        .iter()
        .filter(|p| seen.insert(cell_key(p, cell, 1.0)))
        .copied()
        .collect()
}

/// Threshold, cluster and suppress: joint positions from a score field.
pub fn joints_from_field(field: &ScalarField, tau: f64, eps: f64, min_points: usize) -> Vec<Vec3> {
    let active = threshold_field(field, tau);
    voxel_nms(&dbscan_cluster(&active, eps, min_points), NMS_CELL)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(field: &ScalarField, ijk: [usize; 3]) -> Vec3 {
        field.center(ijk)
    }

    #[test]
    fn kernel_values_at_and_near_joint() {
        let probe = ScalarField::zeros(16);
        let j = node(&probe, [8, 8, 8]);
        let f = gaussian_target_field_with(&[j], 16, Execution::Sequential).unwrap();
        assert_eq!(f.get([8, 8, 8]), 1.0);
        assert!((f.get([9, 8, 8]) - (-1.0f64 / 8.0).exp()).abs() < 1e-12);
        assert!((f.get([8, 10, 8]) - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn coincident_joints_equal_single() {
        let j = Vec3::new(0.1, -0.3, 0.2);
        let one = gaussian_target_field_with(&[j], 12, Execution::Sequential).unwrap();
        let two = gaussian_target_field_with(&[j, j], 12, Execution::Sequential).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn sequential_matches_parallel() {
        let js = [Vec3::new(0.1, -0.3, 0.2), Vec3::new(-0.7, 0.5, 0.0)];
        let a = gaussian_target_field_with(&js, 20, Execution::Sequential).unwrap();
        let b = gaussian_target_field_with(&js, 20, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn field_errors() {
        assert!(gaussian_target_field(&[]).is_err());
        assert!(gaussian_target_field(&[Vec3::new(2.0, 0.0, 0.0)]).is_err());
        assert!(ScalarField::new(2, vec![0.0; 7]).is_err());
        assert!(ScalarField::new(1, vec![1.5]).is_err());
    }

    #[test]
    fn threshold_ball_radius() {
        let probe = ScalarField::zeros(32);
        let j = node(&probe, [16, 16, 16]);
        let f = gaussian_target_field_with(&[j], 32, Execution::Sequential).unwrap();
        let h = f.spacing();
        let radius = 2.0 * (2.0 * 2f64.ln()).sqrt() * h;
        let active = threshold_field(&f, 0.5);
        let expected = (0..32usize.pow(3))
            .filter(|&n| {
                let c = f.center([n / 1024, (n / 32) % 32, n % 32]);
                (c - j).norm() <= radius
            })
            .count();
        assert_eq!(active.len(), expected);
        assert!(active.iter().all(|p| (p - j).norm() <= radius + 1e-12));
        assert!(threshold_field(&f, 1.1).is_empty());
        assert!(threshold_field(&ScalarField::zeros(8), 0.5).is_empty());
    }

    #[test]
    fn threshold_is_monotone() {
        let f = gaussian_target_field_with(&[Vec3::new(0.3, 0.3, 0.3)], 16, Execution::Sequential).unwrap();
        assert!(threshold_field(&f, 0.3).len() >= threshold_field(&f, 0.6).len());
    }

    #[test]
    fn dbscan_basic_cases() {
        let tight: Vec<Vec3> = (0..5).map(|i| Vec3::new(0.01 * i as f64, 0.0, 0.0)).collect();
        let c = dbscan_cluster(&tight, 0.05, 3);
        assert_eq!(c.len(), 1);
        assert!((c[0] - Vec3::new(0.02, 0.0, 0.0)).norm() < 1e-15);

        let sparse = [Vec3::zeros(), Vec3::x()];
        assert!(dbscan_cluster(&sparse, 0.05, 3).is_empty());
    }

    #[test]
    fn dbscan_orders_by_first_member() {
        let mut pts = Vec::new();
        for i in 0..4 {
            pts.push(Vec3::new(0.5, 0.01 * i as f64, 0.0));
            pts.push(Vec3::new(-0.5, 0.01 * i as f64, 0.0));
        }
        let c = dbscan_cluster(&pts, 0.05, 3);
        assert_eq!(c.len(), 2);
        assert!(c[0].x > 0.0 && c[1].x < 0.0);
    }

    #[test]
    fn nms_cells() {
        assert_eq!(voxel_nms(&vec![Vec3::new(0.3, 0.2, 0.1); 128], NMS_CELL).len(), 1);
        assert_eq!(voxel_nms(&[Vec3::zeros(), Vec3::new(0.06, 0.0, 0.0)], NMS_CELL).len(), 2);
        let kept = voxel_nms(&[Vec3::new(0.01, 0.0, 0.0), Vec3::new(0.02, 0.0, 0.0)], NMS_CELL);
        assert_eq!(kept, vec![Vec3::new(0.01, 0.0, 0.0)]);
    }

    #[test]
    fn field_round_trip_recovers_joints() {
        let probe = ScalarField::zeros(FIELD_RESOLUTION);
        let js = [node(&probe, [10, 20, 30]), node(&probe, [40, 40, 12])];
        let f = gaussian_target_field(&js).unwrap();
        let got = joints_from_field(&f, DEFAULT_THRESHOLD, DEFAULT_EPS, DEFAULT_MIN_POINTS);
        assert_eq!(got.len(), 2);
        for (g, j) in got.iter().zip(&js) {
            assert!((g - j).norm() < 1e-9);
        }
    }
}
