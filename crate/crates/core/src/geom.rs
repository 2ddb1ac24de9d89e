//! Small geometry helpers on top of nalgebra.

use nalgebra::{Matrix3, Matrix4, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat4 = Matrix4<f64>;

/// Homogeneous 4x4 matrix from a rotation and a translation.
pub fn rigid(rotation: &Mat3, translation: &Vec3) -> Mat4 {
    let mut m = Mat4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(rotation);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(translation);
    m
}

pub fn rotation_of(m: &Mat4) -> Mat3 {
    m.fixed_view::<3, 3>(0, 0).into_owned()
}

pub fn translation_of(m: &Mat4) -> Vec3 {
    m.fixed_view::<3, 1>(0, 3).into_owned()
}

/// Inverse of a rigid transform: `[R^T | -R^T t]`.
pub fn rigid_inverse(m: &Mat4) -> Mat4 {
    let rt = rotation_of(m).transpose();
    rigid(&rt, &(-(rt * translation_of(m))))
}

pub fn transform_point(m: &Mat4, p: &Vec3) -> Vec3 {
    let r = m.fixed_view::<3, 3>(0, 0);
    r * p + m.fixed_view::<3, 1>(0, 3)
}

/// True when the rotation block is orthonormal with determinant +1.
pub fn is_rotation(r: &Mat3, tol: f64) -> bool {
    let err = (r.transpose() * r - Mat3::identity()).amax();
    err <= tol && (r.determinant() - 1.0).abs() <= tol
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut bb = Aabb {
            min: first,
            max: first,
        };
        for p in it {
            bb.min = bb.min.inf(p);
            bb.max = bb.max.sup(p);
        }
        Some(bb)
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn max_half_extent(&self) -> f64 {
        ((self.max - self.min) * 0.5).max()
    }
}

/// Closest point on segment `[a, b]` to `p`.
pub fn closest_on_segment(p: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;

    #[test]
    fn rigid_inverse_composes_to_identity() {
        let r = Rotation3::from_euler_angles(0.3, -1.1, 2.0).into_inner();
        let m = rigid(&r, &Vec3::new(1.0, -2.0, 0.5));
        let id = m * rigid_inverse(&m);
        assert!((id - Mat4::identity()).amax() < 1e-12);
    }

    #[test]
    fn segment_projection_clamps() {
        let a = Vec3::zeros();
        let b = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(closest_on_segment(&Vec3::new(2.0, 1.0, 0.0), &a, &b), b);
        assert_eq!(
            closest_on_segment(&Vec3::new(0.5, 1.0, 0.0), &a, &b),
            Vec3::new(0.5, 0.0, 0.0)
        );
    }
}
