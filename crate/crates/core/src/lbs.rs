//! Linear blend skinning.
//!
//! Each vertex is moved by the weight-blended matrix `sum_b w_b M_b`, where
//! `M_b = G_b(pose) G_b(rest)^-1`. The blended matrix is formed first and then
//! applied, one vertex at a time, in stored weight order.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geom::{transform_point, Mat4, Vec3};
use crate::skeleton::{blend_matrices, Pose, Skeleton};
use crate::skin::SkinMatrix;

pub use crate::skeleton::blend_matrices as skinning_transforms;

/// Deform `vertices` under `pose`.
pub fn deform(vertices: &[Vec3], skeleton: &Skeleton, skinning: &SkinMatrix, pose: &Pose) -> Result<Vec<Vec3>> {
    deform_with(vertices, skeleton, skinning, pose, Execution::default())
}

pub fn deform_with(
    vertices: &[Vec3],
    skeleton: &Skeleton,
    skinning: &SkinMatrix,
    pose: &Pose,
    exec: Execution,
) -> Result<Vec<Vec3>> {
    if skinning.vertex_count() != vertices.len() {
        return Err(Error::Dimension(format!(
            "{} weight rows for {} vertices",
            skinning.vertex_count(),
            vertices.len()
        )));
    }
    if skinning.bone_count() != skeleton.bone_count() {
        return Err(Error::Dimension(format!(
            "{} weight columns for {} bones",
            skinning.bone_count(),
            skeleton.bone_count()
        )));
    }
    let matrices = blend_matrices(skeleton, pose)?;
    Ok(apply_blend(vertices, skinning, &matrices, exec))
}

/// Apply precomputed per-bone skinning matrices.
pub fn apply_blend(vertices: &[Vec3], skinning: &SkinMatrix, matrices: &[Mat4], exec: Execution) -> Vec<Vec3> {
    exec.map_range(vertices.len(), |i| {
        let mut blended = Mat4::zeros();
        for &(b, w) in skinning.row(i) {
            blended += matrices[b] * w;
        }
        transform_point(&blended, &vertices[i])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rigid, rotation_of, Mat3};
    use crate::skeleton::{rest_pose, Bone};
    use nalgebra::Rotation3;

    fn two_roots() -> Skeleton {
        // both bones along +z so their local x-axis is world x
        Skeleton::new(
            vec![
                Vec3::zeros(),
                Vec3::new(0.0, 0.0, 1.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 1.0),
            ],
            vec![Bone::new(0, 1, None), Bone::new(2, 3, None)],
        )
        .unwrap()
    }

    #[test]
    fn identity_pose_is_a_no_op() {
        let s = two_roots();
        let verts = vec![Vec3::new(0.2, 0.3, 0.4), Vec3::new(-1.0, 2.0, 0.5)];
        let w = SkinMatrix::from_dense(&[vec![0.3, 0.7], vec![1.0, 0.0]]).unwrap();
        let out = deform(&verts, &s, &w, &Pose::identity(2)).unwrap();
        for (a, b) in out.iter().zip(&verts) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_bone_rotation_about_head() {
        let head = Vec3::new(0.5, -0.2, 0.1);
        let s = Skeleton::new(vec![head, Vec3::new(1.5, 0.3, 0.4)], vec![Bone::new(0, 1, None)]).unwrap();
        let r_local = Rotation3::from_euler_angles(0.4, -0.3, 1.2).into_inner();
        let pose = Pose::new(vec![rigid(&r_local, &Vec3::zeros())]).unwrap();
        let r_world = {
            let r0 = rotation_of(&rest_pose(&s).unwrap().globals[0]);
            r0 * r_local * r0.transpose()
        };
        let verts = vec![Vec3::new(1.0, 1.0, 1.0), Vec3::new(-0.5, 0.0, 2.0)];
        let w = SkinMatrix::from_dense(&[vec![1.0], vec![1.0]]).unwrap();
        let out = deform(&verts, &s, &w, &pose).unwrap();
        for (o, v) in out.iter().zip(&verts) {
            assert!((o - (head + r_world * (v - head))).norm() < 1e-12);
        }
    }

    #[test]
    fn half_weights_move_half_the_translation() {
        let s = two_roots();
        let mut pose = Pose::identity(2);
        pose.set(0, rigid(&Mat3::identity(), &Vec3::new(1.0, 0.0, 0.0))).unwrap();
        let v = Vec3::new(0.3, 0.3, 0.3);
        let w = SkinMatrix::from_dense(&[vec![0.5, 0.5]]).unwrap();
        let out = deform(&[v], &s, &w, &pose).unwrap();
        assert!((out[0] - (v + Vec3::new(0.5, 0.0, 0.0))).norm() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let s = two_roots();
        let w = SkinMatrix::from_dense(&[vec![1.0, 0.0]]).unwrap();
        assert!(deform(&[], &s, &w, &Pose::identity(2)).is_err());
        assert!(deform(&[Vec3::zeros()], &s, &w, &Pose::identity(3)).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let s = two_roots();
        let mut pose = Pose::identity(2);
        pose.set(1, Pose::axis_angle(Vec3::new(1.0, 2.0, 3.0), 0.8, Vec3::new(0.1, 0.0, 0.2)).unwrap())
            .unwrap();
        let verts: Vec<Vec3> = (0..500).map(|i| Vec3::new(i as f64 * 0.01, 0.5, -0.25)).collect();
        let rows: Vec<Vec<f64>> = (0..500)
            .map(|i| {
                let t = (i % 10) as f64 / 10.0;
                vec![t, 1.0 - t]
            })
            .collect();
        let w = SkinMatrix::from_dense(&rows).unwrap();
        let a = deform_with(&verts, &s, &w, &pose, Execution::Sequential).unwrap();
        let b = deform_with(&verts, &s, &w, &pose, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
