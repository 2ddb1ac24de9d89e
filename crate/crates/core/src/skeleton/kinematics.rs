use nalgebra::{Rotation3, Unit};

use super::{validate_forest, Skeleton, MIN_BONE_LENGTH};
use crate::error::{Error, Result};
use crate::geom::{is_rotation, rigid, rigid_inverse, rotation_of, Mat3, Mat4, Vec3};

/// World up axis used to keep each bone's local x-axis horizontal.
pub const WORLD_UP: Vec3 = Vec3::new(0.0, 1.0, 0.0);

/// Bones closer than this to vertical (|cos| > 1 - tol) use world +x as the
/// horizontal reference instead of [`WORLD_UP`].
const VERTICAL_TOLERANCE: f64 = 1e-6;

const ROTATION_TOLERANCE: f64 = 1e-6;

/// Per-bone local rigid transforms, applied in each bone's rest frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    transforms: Vec<Mat4>,
}

impl Pose {
    pub fn identity(bone_count: usize) -> Self {
        Pose {
            transforms: vec![Mat4::identity(); bone_count],
        }
    }

    /// Rejects any transform whose rotation block is not a proper rotation
    /// or whose bottom row is not `[0 0 0 1]`.
    pub fn new(transforms: Vec<Mat4>) -> Result<Self> {
        for (b, m) in transforms.iter().enumerate() {
            let bottom = m.fixed_view::<1, 4>(3, 0);
            let bottom_ok = bottom[0] == 0.0 && bottom[1] == 0.0 && bottom[2] == 0.0 && bottom[3] == 1.0;
            if !bottom_ok || !is_rotation(&rotation_of(m), ROTATION_TOLERANCE) {
                return Err(Error::InvalidPose(format!("bone {b}: transform is not rigid")));
            }
        }
        Ok(Pose { transforms })
    }

    /// Rotation of `angle` radians about `axis`, then translation.
    pub fn axis_angle(axis: Vec3, angle: f64, translation: Vec3) -> Result<Mat4> {
        let rotation = if angle == 0.0 {
            Mat3::identity()
        } else {
            let unit = Unit::try_new(axis, 1e-12)
                .ok_or_else(|| Error::InvalidPose("rotation axis has zero length".into()))?;
            Rotation3::from_axis_angle(&unit, angle).into_inner()
        };
        Ok(rigid(&rotation, &translation))
    }

    pub fn set(&mut self, bone: usize, transform: Mat4) -> Result<()> {
        if !is_rotation(&rotation_of(&transform), ROTATION_TOLERANCE) {
            return Err(Error::InvalidPose(format!("bone {bone}: transform is not rigid")));
        }
        let slot = self
            .transforms
            .get_mut(bone)
            .ok_or_else(|| Error::InvalidPose(format!("bone {bone} out of range")))?;
        *slot = transform;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transforms.is_empty()
    }

    pub fn transforms(&self) -> &[Mat4] {
        &self.transforms
    }
}

/// Rest-pose transforms derived from joint positions.
///
/// `globals[b]` maps the bone's local frame to world space: the origin goes
/// to the head joint and `(0, 0, L_b)` to the tail. `locals[b]` is the same
/// transform relative to the parent's frame, so `globals[b] = globals[parent] * locals[b]`.
/// For a child attached at its parent's tail the local translation is
/// `(0, 0, L_parent)`; roots carry their world head position.
#[derive(Debug, Clone, PartialEq)]
pub struct RestPose {
    pub globals: Vec<Mat4>,
    pub locals: Vec<Mat4>,
}

/// World-space rest frame of a bone: z along the bone, x horizontal.
pub(crate) fn bone_frame(head: &Vec3, tail: &Vec3) -> Result<Mat4> {
    let axis = tail - head;
    let len = axis.norm();
    if len <= MIN_BONE_LENGTH {
        return Err(Error::Degenerate("zero-length bone".into()));
    }
    let z = axis / len;
    let reference = if z.dot(&WORLD_UP).abs() > 1.0 - VERTICAL_TOLERANCE {
        Vec3::x()
    } else {
        WORLD_UP
    };
    let x = reference.cross(&z).normalize();
    let y = z.cross(&x);
    let r = Mat3::from_columns(&[x, y, z]);
    Ok(rigid(&r, head))
}

/// Derive the rest pose, lookat-style, from each bone's head and tail.
pub fn rest_pose(skeleton: &Skeleton) -> Result<RestPose> {
    validate_forest(skeleton).into_result()?;
    let n = skeleton.bone_count();
    let mut globals = vec![Mat4::identity(); n];
    let mut locals = vec![Mat4::identity(); n];
    for b in skeleton.topological_order()? {
        let g = bone_frame(&skeleton.head(b), &skeleton.tail(b))
            .map_err(|_| Error::Degenerate(format!("bone {b} has zero length")))?;
        locals[b] = match skeleton.bones[b].parent {
            Some(p) => rigid_inverse(&globals[p]) * g,
            None => g,
        };
        globals[b] = g;
    }
    Ok(RestPose { globals, locals })
}

/// Compose `G_b = G_parent * rest_local_b * pose_b` down the kinematic tree.
pub fn forward_kinematics(skeleton: &Skeleton, rest: &RestPose, pose: &Pose) -> Result<Vec<Mat4>> {
    let n = skeleton.bone_count();
    if pose.len() != n {
        return Err(Error::Dimension(format!(
            "pose has {} transforms for {n} bones",
            pose.len()
        )));
    }
    if rest.locals.len() != n {
        return Err(Error::Dimension(format!(
            "rest pose has {} bones, skeleton has {n}",
            rest.locals.len()
        )));
    }
    let mut globals = vec![Mat4::identity(); n];
    for b in skeleton.topological_order()? {
        let local = rest.locals[b] * pose.transforms[b];
        globals[b] = match skeleton.bones[b].parent {
            Some(p) => globals[p] * local,
            None => local,
        };
    }
    Ok(globals)
}

/// Per-bone skinning transforms `G_b(pose) * G_b(rest)^-1`.
pub fn blend_matrices(skeleton: &Skeleton, pose: &Pose) -> Result<Vec<Mat4>> {
    let rest = rest_pose(skeleton)?;
    blend_matrices_with_rest(skeleton, &rest, pose)
}

pub fn blend_matrices_with_rest(skeleton: &Skeleton, rest: &RestPose, pose: &Pose) -> Result<Vec<Mat4>> {
    let posed = forward_kinematics(skeleton, rest, pose)?;
    Ok(posed
        .iter()
        .zip(&rest.globals)
        .map(|(g, g0)| g * rigid_inverse(g0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{transform_point, translation_of};
    use crate::skeleton::Bone;
    use std::f64::consts::FRAC_PI_2;

    fn single(head: Vec3, tail: Vec3) -> Skeleton {
        Skeleton::new(vec![head, tail], vec![Bone::new(0, 1, None)]).unwrap()
    }

    fn assert_close(a: &Vec3, b: &Vec3, tol: f64) {
        assert!((a - b).norm() < tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn horizontal_bone_matches_hand_built_lookat() {
        // z = (1,0,0); x = up x z = (0,0,-1); y = z x x = (0,1,0)
        let s = single(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0));
        let rest = rest_pose(&s).unwrap();
        #[rustfmt::skip]
        let expected = Mat4::new(
            0.0, 0.0, 1.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            -1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        assert!((rest.globals[0] - expected).amax() < 1e-15);
        assert_close(&transform_point(&rest.globals[0], &Vec3::zeros()), &Vec3::zeros(), 1e-12);
        assert_close(
            &transform_point(&rest.globals[0], &Vec3::new(0.0, 0.0, 1.0)),
            &Vec3::new(1.0, 0.0, 0.0),
            1e-12,
        );
    }

    #[test]
    fn bone_along_z_maps_origin_and_tail() {
        let s = single(Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0));
        let g = rest_pose(&s).unwrap().globals[0];
        assert_close(&transform_point(&g, &Vec3::zeros()), &Vec3::zeros(), 1e-12);
        assert_close(&transform_point(&g, &Vec3::z()), &Vec3::z(), 1e-12);
        assert!(is_rotation(&rotation_of(&g), 1e-12));
    }

    #[test]
    fn vertical_bone_uses_fallback_reference() {
        let s = single(Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.5, 2.0, 0.0));
        let g = rest_pose(&s).unwrap().globals[0];
        let x_axis = rotation_of(&g).column(0).into_owned();
        assert!(x_axis[1].abs() < 1e-12);
        assert!(is_rotation(&rotation_of(&g), 1e-12));
        assert_close(&transform_point(&g, &Vec3::new(0.0, 0.0, 2.0)), &Vec3::new(0.5, 2.0, 0.0), 1e-12);
    }

    #[test]
    fn x_axis_is_horizontal_for_generic_bone() {
        let s = single(Vec3::new(0.1, 0.2, 0.3), Vec3::new(0.7, -0.4, 1.5));
        let g = rest_pose(&s).unwrap().globals[0];
        assert!(rotation_of(&g).column(0)[1].abs() < 1e-14);
    }

    #[test]
    fn chained_globals_compose_through_parent() {
        let s = Skeleton::new(
            vec![Vec3::zeros(), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 2.0, 0.0)],
            vec![Bone::new(0, 1, None), Bone::new(1, 2, Some(0))],
        )
        .unwrap();
        let rest = rest_pose(&s).unwrap();
        // child offset lives at the parent's tail in the parent's frame
        assert_close(&translation_of(&rest.locals[1]), &Vec3::new(0.0, 0.0, 1.0), 1e-12);
        let composed = rest.globals[0] * rest.locals[1];
        assert!((composed - rest.globals[1]).amax() < 1e-12);
        assert_close(&transform_point(&rest.globals[1], &Vec3::zeros()), &Vec3::new(0.0, 1.0, 0.0), 1e-12);
    }

    #[test]
    fn identity_pose_reproduces_rest() {
        let s = Skeleton::new(
            vec![Vec3::zeros(), Vec3::new(0.3, 1.0, 0.0), Vec3::new(0.0, 2.0, 0.4)],
            vec![Bone::new(0, 1, None), Bone::new(1, 2, Some(0))],
        )
        .unwrap();
        let rest = rest_pose(&s).unwrap();
        let g = forward_kinematics(&s, &rest, &Pose::identity(2)).unwrap();
        for (a, b) in g.iter().zip(&rest.globals) {
            assert!((a - b).amax() < 1e-12);
        }
    }

    #[test]
    fn root_rotation_rotates_about_head() {
        let head = Vec3::new(1.0, 0.5, 0.0);
        let s = single(head, Vec3::new(2.0, 0.5, 0.0));
        let rest = rest_pose(&s).unwrap();
        // local rotation chosen so the world effect is 90 degrees about world z
        let rz = Rotation3::from_axis_angle(&Vec3::z_axis(), FRAC_PI_2).into_inner();
        let r0 = rotation_of(&rest.globals[0]);
        let local = rigid(&(r0.transpose() * rz * r0), &Vec3::zeros());
        let pose = Pose::new(vec![local]).unwrap();
        let blend = blend_matrices(&s, &pose).unwrap()[0];
        // hand-composed: T(head) * Rz * T(-head)
        let expected = rigid(&Mat3::identity(), &head) * rigid(&rz, &Vec3::zeros()) * rigid(&Mat3::identity(), &-head);
        assert!((blend - expected).amax() < 1e-12);
        let g = forward_kinematics(&s, &rest, &pose).unwrap()[0];
        assert_close(&transform_point(&g, &Vec3::z()), &(head + Vec3::new(0.0, 1.0, 0.0)), 1e-12);
    }

    #[test]
    fn rotating_child_leaves_parent_alone() {
        let s = Skeleton::new(
            vec![Vec3::zeros(), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 2.0, 0.0)],
            vec![Bone::new(0, 1, None), Bone::new(1, 2, Some(0))],
        )
        .unwrap();
        let rest = rest_pose(&s).unwrap();
        let mut pose = Pose::identity(2);
        pose.set(1, Pose::axis_angle(Vec3::x(), 0.7, Vec3::zeros()).unwrap()).unwrap();
        let g = forward_kinematics(&s, &rest, &pose).unwrap();
        assert!((g[0] - rest.globals[0]).amax() < 1e-15);
        assert!((g[1] - rest.globals[1]).amax() > 1e-3);
    }

    #[test]
    fn pose_count_mismatch_is_an_error() {
        let s = single(Vec3::zeros(), Vec3::x());
        let rest = rest_pose(&s).unwrap();
        assert!(forward_kinematics(&s, &rest, &Pose::identity(2)).is_err());
    }

    #[test]
    fn non_rigid_pose_rejected() {
        let mut m = Mat4::identity();
        m[(0, 0)] = 2.0;
        assert!(Pose::new(vec![m]).is_err());
        assert!(Pose::axis_angle(Vec3::zeros(), 1.0, Vec3::zeros()).is_err());
    }
}
