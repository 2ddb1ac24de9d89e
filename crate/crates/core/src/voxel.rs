//! Solid voxelization of triangle meshes.
//!
//! A voxel is occupied when a triangle passes through its interior (the
//! surface shell) or when it is enclosed: not reachable by a 6-connected
//! flood fill from the grid boundary. The flood fill may not step between
//! two voxel centers if a triangle crosses the segment joining them, so
//! surfaces that lie exactly on voxel faces still seal the interior.

use std::collections::VecDeque;

use crate::asset::MeshAsset;
use crate::error::{Error, Result};
use crate::geom::Vec3;

pub const MIN_RESOLUTION: usize = 8;

/// Relative shrink applied to voxel boxes in the shell test, so triangles
/// that only touch a voxel's boundary do not mark it.
const SHELL_SHRINK: f64 = 1e-6;

/// Cubic `R x R x R` occupancy grid. Voxel `(i, j, k)` spans
/// `origin + [i, i+1] * spacing` along x (likewise y, z).
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    resolution: usize,
    origin: Vec3,
    spacing: f64,
    occupied: Vec<bool>,
}

impl VoxelGrid {
    pub fn empty(resolution: usize, origin: Vec3, spacing: f64) -> Self {
        VoxelGrid {
            resolution,
            origin,
            spacing,
            occupied: vec![false; resolution.pow(3)],
        }
    }

    pub fn from_occupancy(resolution: usize, origin: Vec3, spacing: f64, occupied: Vec<bool>) -> Result<Self> {
        if occupied.len() != resolution.pow(3) {
            return Err(Error::Dimension(format!(
                "{} occupancy flags for a {resolution}^3 grid",
                occupied.len()
            )));
        }
        if !(spacing > 0.0) {
            return Err(Error::InvalidArgument(format!("voxel spacing {spacing} must be positive")));
        }
        Ok(VoxelGrid {
            resolution,
            origin,
            spacing,
            occupied,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn index(&self, [i, j, k]: [usize; 3]) -> usize {
        (i * self.resolution + j) * self.resolution + k
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let r = self.resolution;
        [index / (r * r), (index / r) % r, index % r]
    }

    pub fn center(&self, [i, j, k]: [usize; 3]) -> Vec3 {
        self.origin + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * self.spacing
    }

    /// Voxel containing `p`, or `None` outside the grid. Points on a shared
    /// face belong to the higher voxel.
    pub fn cell_of(&self, p: &Vec3) -> Option<[usize; 3]> {
        let mut c = [0usize; 3];
        for a in 0..3 {
            let t = ((p[a] - self.origin[a]) / self.spacing).floor();
            if !(t >= 0.0 && t < self.resolution as f64) {
                return None;
            }
            c[a] = t as usize;
        }
        Some(c)
    }

    /// Like [`cell_of`](Self::cell_of) but clamps onto the grid.
    pub fn cell_of_clamped(&self, p: &Vec3) -> [usize; 3] {
        let max = (self.resolution - 1) as f64;
        let mut c = [0usize; 3];
        for a in 0..3 {
            let t = ((p[a] - self.origin[a]) / self.spacing).floor();
            c[a] = if t.is_nan() { 0.0 } else { t.clamp(0.0, max) } as usize;
        }
        c
    }

    pub fn is_occupied(&self, index: usize) -> bool {
        self.occupied[index]
    }

    pub fn set_occupied(&mut self, index: usize, value: bool) {
        self.occupied[index] = value;
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupied
    }

    /// Face-adjacent neighbours of a voxel, in -x,+x,-y,+y,-z,+z order.
    pub fn neighbors(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        let c = self.coords(index);
        let r = self.resolution;
        (0..6).filter_map(move |n| {
            let axis = n / 2;
            let mut d = c;
            if n % 2 == 0 {
                d[axis] = d[axis].checked_sub(1)?;
            } else {
                d[axis] += 1;
                if d[axis] >= r {
                    return None;
                }
            }
            Some(self.index(d))
        })
    }

    /// Voxels touched by segment `[a, b]`, sampled at quarter-voxel steps.
    /// Parts outside the grid are skipped. Sorted, without duplicates.
    pub fn rasterize_segment(&self, a: &Vec3, b: &Vec3) -> Vec<usize> {
        let len = (b - a).norm();
        let steps = ((len / (0.25 * self.spacing)).ceil() as usize).max(1);
        let mut cells: Vec<usize> = (0..=steps)
            .filter_map(|s| {
                let t = s as f64 / steps as f64;
                self.cell_of(&(a + (b - a) * t)).map(|c| self.index(c))
            })
            .collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    }
}

/// Voxelize a mesh normalized to `[-1, 1]^3`.
pub fn voxelize(mesh: &MeshAsset, resolution: usize) -> Result<VoxelGrid> {
    voxelize_in(mesh, resolution, Vec3::from_element(-1.0), 2.0 / resolution as f64)
}

/// Voxelize over an explicit cubic domain.
pub fn voxelize_in(mesh: &MeshAsset, resolution: usize, origin: Vec3, spacing: f64) -> Result<VoxelGrid> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "voxel resolution {resolution} below minimum {MIN_RESOLUTION}"
        )));
    }
    if mesh.faces.is_empty() {
        return Err(Error::Empty("mesh has no faces"));
    }
    let mut grid = VoxelGrid::from_occupancy(resolution, origin, spacing, vec![false; resolution.pow(3)])?;
    let mut blocked = [
        vec![false; grid.len()],
        vec![false; grid.len()],
        vec![false; grid.len()],
    ];
    for f in 0..mesh.faces.len() {
        let tri = mesh.triangle(f);
        mark_shell(&mut grid, &tri);
        for (axis, table) in blocked.iter_mut().enumerate() {
            mark_crossings(&grid, &tri, axis, table);
        }
    }
    let outside = flood_outside(&grid, &blocked);
    for (idx, out) in outside.into_iter().enumerate() {
        if !out {
            grid.occupied[idx] = true;
        }
    }
    Ok(grid)
}

fn index_range(lo: f64, hi: f64, r: usize) -> Option<(usize, usize)> {
    let max = r as f64 - 1.0;
    let lo = lo.floor();
    let hi = hi.floor();
    if hi < 0.0 || lo > max {
        return None;
    }
    Some((lo.max(0.0) as usize, hi.min(max) as usize))
}

fn mark_shell(grid: &mut VoxelGrid, tri: &[Vec3; 3]) {
    let h = grid.spacing;
    let r = grid.resolution;
    let mut ranges = [(0usize, 0usize); 3];
    for a in 0..3 {
        let lo = tri.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
        let hi = tri.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
        match index_range((lo - grid.origin[a]) / h, (hi - grid.origin[a]) / h, r) {
            Some(range) => ranges[a] = range,
            None => return,
        }
    }
    let half = Vec3::from_element(0.5 * h * (1.0 - SHELL_SHRINK));
    for i in ranges[0].0..=ranges[0].1 {
        for j in ranges[1].0..=ranges[1].1 {
            for k in ranges[2].0..=ranges[2].1 {
                let c = [i, j, k];
                let idx = grid.index(c);
                if !grid.occupied[idx] && triangle_box_overlap(&grid.center(c), &half, tri) {
                    grid.occupied[idx] = true;
                }
            }
        }
    }
}

/// Mark the center-to-center edges along `axis` that the triangle crosses.
/// `table[idx]` refers to the edge between voxel `idx` and its +axis neighbour.
fn mark_crossings(grid: &VoxelGrid, tri: &[Vec3; 3], axis: usize, table: &mut [bool]) {
    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
    let h = grid.spacing;
    let r = grid.resolution;
    let o = grid.origin;
    let p: Vec<[f64; 3]> = tri.iter().map(|q| [q[u], q[v], q[axis]]).collect();
    let area = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    if area.abs() <= 1e-18 {
        return;
    }
    let range = |a: usize, orig: f64| {
        let lo = p.iter().map(|q| q[a]).fold(f64::INFINITY, f64::min);
        let hi = p.iter().map(|q| q[a]).fold(f64::NEG_INFINITY, f64::max);
        // centre indices c with orig + (c + 0.5) h in [lo, hi]
        let first = ((lo - orig) / h - 0.5).ceil().max(0.0);
        let last = ((hi - orig) / h - 0.5).floor().min(r as f64 - 1.0);
        (first <= last).then_some((first as usize, last as usize))
    };
    let (Some((u0, u1)), Some((v0, v1))) = (range(0, o[u]), range(1, o[v])) else {
        return;
    };
    const TOL: f64 = 1e-9;
    for cu in u0..=u1 {
        let pu = o[u] + (cu as f64 + 0.5) * h;
        for cv in v0..=v1 {
            let pv = o[v] + (cv as f64 + 0.5) * h;
            let edge = |a: &[f64; 3], b: &[f64; 3]| (b[0] - a[0]) * (pv - a[1]) - (pu - a[0]) * (b[1] - a[1]);
            let l0 = edge(&p[1], &p[2]) / area;
            let l1 = edge(&p[2], &p[0]) / area;
            let l2 = edge(&p[0], &p[1]) / area;
            if l0 < -TOL || l1 < -TOL || l2 < -TOL {
                continue;
            }
            let depth = l0 * p[0][2] + l1 * p[1][2] + l2 * p[2][2];
            let s = (depth - o[axis]) / h - 0.5;
            let first = (s - 1.0).ceil().max(0.0);
            let last = s.floor().min(r as f64 - 2.0);
            if first > last {
                continue;
            }
            for m in first as usize..=last as usize {
                let mut c = [0usize; 3];
                c[axis] = m;
                c[u] = cu;
                c[v] = cv;
                table[grid.index(c)] = true;
            }
        }
    }
}

fn flood_outside(grid: &VoxelGrid, blocked: &[Vec<bool>; 3]) -> Vec<bool> {
    let r = grid.resolution;
    let mut outside = vec![false; grid.len()];
    let mut queue = VecDeque::new();
    for idx in 0..grid.len() {
        let c = grid.coords(idx);
        let on_boundary = c.iter().any(|&x| x == 0 || x == r - 1);
        if on_boundary && !grid.occupied[idx] {
            outside[idx] = true;
            queue.push_back(idx);
        }
    }
    while let Some(idx) = queue.pop_front() {
        let c = grid.coords(idx);
        for axis in 0..3 {
            for step_up in [false, true] {
                let mut d = c;
                let lower = if step_up {
                    if c[axis] + 1 >= r {
                        continue;
                    }
                    d[axis] += 1;
                    idx
                } else {
                    if c[axis] == 0 {
                        continue;
                    }
                    d[axis] -= 1;
                    grid.index(d)
                };
                let n = grid.index(d);
                if outside[n] || grid.occupied[n] || blocked[axis][lower] {
                    continue;
                }
                outside[n] = true;
                queue.push_back(n);
            }
        }
    }
    outside
}

/// Separating-axis test between a triangle and an axis-aligned box.
pub fn triangle_box_overlap(center: &Vec3, half: &Vec3, tri: &[Vec3; 3]) -> bool {
    let v = [tri[0] - center, tri[1] - center, tri[2] - center];
    for a in 0..3 {
        let lo = v.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min);
        let hi = v.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max);
        if lo > half[a] || hi < -half[a] {
            return false;
        }
    }
    let e = [v[1] - v[0], v[2] - v[1], v[0] - v[2]];
    for edge in &e {
        for a in 0..3 {
            let axis = Vec3::ith(a, 1.0).cross(edge);
            if axis.norm_squared() == 0.0 {
                continue;
            }
            if separated(&axis, &v, half) {
                return false;
            }
        }
    }
    let normal = e[0].cross(&e[1]);
    if normal.norm_squared() > 0.0 && separated(&normal, &v, half) {
        return false;
    }
    true
}

fn separated(axis: &Vec3, v: &[Vec3; 3], half: &Vec3) -> bool {
    let proj = v.map(|p| p.dot(axis));
    let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let radius = half.x * axis.x.abs() + half.y * axis.y.abs() + half.z * axis.z.abs();
    lo > radius || hi < -radius
}

/// Closed axis-aligned box mesh with 12 triangles, outward-facing.
pub fn box_mesh(min: Vec3, max: Vec3) -> MeshAsset {
    let c = |x: bool, y: bool, z: bool| {
        Vec3::new(
            if x { max.x } else { min.x },
            if y { max.y } else { min.y },
            if z { max.z } else { min.z },
        )
    };
    let vertices = vec![
        c(false, false, false),
        c(true, false, false),
        c(true, true, false),
        c(false, true, false),
        c(false, false, true),
        c(true, false, true),
        c(true, true, true),
        c(false, true, true),
    ];
    let faces = vec![
        [0, 2, 1],
        [0, 3, 2],
        [4, 5, 6],
        [4, 6, 7],
        [0, 1, 5],
        [0, 5, 4],
        [3, 7, 6],
        [3, 6, 2],
        [0, 4, 7],
        [0, 7, 3],
        [1, 2, 6],
        [1, 6, 5],
    ];
    MeshAsset { vertices, faces }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_unit_cube_fills_its_volume() {
        // volume 1 inside a [-1,1]^3 domain: 1/8 of 16^3 voxels
        let grid = voxelize(&box_mesh(Vec3::from_element(-0.5), Vec3::from_element(0.5)), 16).unwrap();
        let analytic = 16usize.pow(3) as f64 / 8.0;
        let count = grid.occupied_count() as f64;
        assert!((count - analytic).abs() <= 0.1 * analytic, "{count} vs {analytic}");
    }

    #[test]
    fn offset_cube_is_solid_with_shell() {
        let grid = voxelize(&box_mesh(Vec3::new(-0.43, -0.51, -0.37), Vec3::new(0.41, 0.33, 0.47)), 32).unwrap();
        let inner = grid.cell_of(&Vec3::zeros()).unwrap();
        assert!(grid.is_occupied(grid.index(inner)));
        let corner = grid.cell_of(&Vec3::from_element(0.9)).unwrap();
        assert!(!grid.is_occupied(grid.index(corner)));
        // enclosed volume is at least the analytic voxel count
        let analytic = 0.84 * 0.84 * 0.84 / (2.0f64 / 32.0).powi(3);
        assert!(grid.occupied_count() as f64 >= analytic);
    }

    #[test]
    fn single_triangle_is_only_shell() {
        let mesh = MeshAsset::new(
            vec![Vec3::new(-0.5, -0.5, 0.013), Vec3::new(0.5, -0.5, 0.013), Vec3::new(0.0, 0.5, 0.013)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let grid = voxelize(&mesh, 16).unwrap();
        let filled: Vec<_> = (0..grid.len()).filter(|&i| grid.is_occupied(i)).collect();
        assert!(!filled.is_empty());
        // z = 0.013 sits inside voxel layer 8, nothing else gets filled
        assert!(filled.iter().all(|&i| grid.coords(i)[2] == 8));
    }

    #[test]
    fn empty_mesh_and_low_resolution_rejected() {
        let empty = MeshAsset::new(vec![], vec![]).unwrap();
        assert!(voxelize(&empty, 16).is_err());
        let cube = box_mesh(Vec3::from_element(-0.5), Vec3::from_element(0.5));
        assert!(voxelize(&cube, 4).is_err());
    }

    #[test]
    fn overlap_test_basics() {
        let tri = [Vec3::new(-1.0, -1.0, 0.0), Vec3::new(1.0, -1.0, 0.0), Vec3::new(0.0, 1.0, 0.0)];
        let half = Vec3::from_element(0.1);
        assert!(triangle_box_overlap(&Vec3::zeros(), &half, &tri));
        assert!(!triangle_box_overlap(&Vec3::new(0.0, 0.0, 0.5), &half, &tri));
        assert!(!triangle_box_overlap(&Vec3::new(0.9, 0.9, 0.0), &half, &tri));
    }

    #[test]
    fn neighbours_respect_bounds() {
        let g = VoxelGrid::empty(8, Vec3::zeros(), 1.0);
        assert_eq!(g.neighbors(0).count(), 3);
        assert_eq!(g.neighbors(g.index([3, 3, 3])).count(), 6);
        assert_eq!(g.coords(g.index([1, 2, 3])), [1, 2, 3]);
    }

    #[test]
    fn segment_rasterization_is_contiguous() {
        let g = VoxelGrid::empty(16, Vec3::from_element(-1.0), 0.125);
        let cells = g.rasterize_segment(&Vec3::new(-0.9, 0.01, 0.01), &Vec3::new(0.9, 0.01, 0.01));
        assert_eq!(cells.len(), 16);
    }
}
