//! Rigid transforms, collision primitives, and the finite sensor cone.
//!
//! Everything here is a plain value type; all predicates are pure.

mod cone;
mod distance;

use nalgebra::{Isometry3, Translation3, Unit, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

pub use cone::{cone_sphere_intersect, Cone, GRAZING_TOLERANCE};
pub use distance::{
    closest_point_on_segment, point_box_distance, primitive_pair_distance, segment_box_distance,
    segment_segment_distance,
};

pub type Vec3 = Vector3<f64>;

/// A rigid motion: rotation (unit quaternion) followed by translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform {
    iso: Isometry3<f64>,
}

impl Default for Transform {
    fn default() -> Self {
        Self::identity()
    }
}

impl Transform {
    pub fn identity() -> Self {
        Self {
            iso: Isometry3::identity(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vec3) -> Self {
        Self {
            iso: Isometry3::from_parts(Translation3::from(translation), rotation),
        }
    }

    pub fn from_translation(translation: Vec3) -> Self {
        Self::new(UnitQuaternion::identity(), translation)
    }

    pub fn from_rotation(rotation: UnitQuaternion<f64>) -> Self {
        Self::new(rotation, Vec3::zeros())
    }

    /// Rotation of `angle` radians about `axis` (need not be normalized, must be nonzero).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        Self::from_rotation(UnitQuaternion::from_axis_angle(&Unit::new_normalize(*axis), angle))
    }

    /// Fixed-axis roll/pitch/yaw (x, then y, then z), radians.
    pub fn from_rpy(translation: Vec3, roll: f64, pitch: f64, yaw: f64) -> Self {
        Self::new(UnitQuaternion::from_euler_angles(roll, pitch, yaw), translation)
    }

    pub fn rotation(&self) -> &UnitQuaternion<f64> {
        &self.iso.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.iso.translation.vector
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Transform) -> Transform {
        Transform {
            iso: self.iso * other.iso,
        }
    }

    pub fn inverse(&self) -> Transform {
        Transform {
            iso: self.iso.inverse(),
        }
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.iso.rotation * p + self.iso.translation.vector
    }

    /// Rotates a direction; translation does not apply.
    pub fn transform_vector(&self, v: &Vec3) -> Vec3 {
        self.iso.rotation * v
    }

    pub(crate) fn inverse_transform_point(&self, p: &Vec3) -> Vec3 {
        self.iso
            .rotation
            .inverse_transform_vector(&(p - self.iso.translation.vector))
    }
}

impl std::ops::Mul for Transform {
    type Output = Transform;

    fn mul(self, rhs: Transform) -> Transform {
        self.compose(&rhs)
    }
}

/// Free-function form of [`Transform::transform_point`].
pub fn transform_point(t: &Transform, p: &Vec3) -> Vec3 {
    t.transform_point(p)
}

/// Shape of a collision primitive, in its own frame.
///
/// Capsules are a segment along the local z axis, centered at the origin,
/// swept by a ball. Boxes are centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Sphere { radius: f64 },
    Capsule { radius: f64, length: f64 },
    Box { size: Vec3 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Primitive {
    shape: Shape,
    pose: Transform,
}

impl Primitive {
    pub fn new(shape: Shape, pose: Transform) -> Result<Self> {
        let ok = match shape {
            Shape::Sphere { radius } => radius > 0.0,
            Shape::Capsule { radius, length } => radius > 0.0 && length > 0.0,
            Shape::Box { size } => size.iter().all(|&s| s > 0.0),
        };
        let finite = match shape {
            Shape::Sphere { radius } => radius.is_finite(),
            Shape::Capsule { radius, length } => radius.is_finite() && length.is_finite(),
            Shape::Box { size } => size.iter().all(|s| s.is_finite()),
        };
        if !ok || !finite {
            return Err(Error::validation(
                "primitive",
                "all dimensions must be positive and finite",
            ));
        }
        Ok(Self { shape, pose })
    }

    pub fn sphere(center: Vec3, radius: f64) -> Result<Self> {
        Self::new(Shape::Sphere { radius }, Transform::from_translation(center))
    }

    /// Capsule whose core segment runs from `a` to `b`.
    pub fn capsule_between(a: Vec3, b: Vec3, radius: f64) -> Result<Self> {
        let d = b - a;
        let length = d.norm();
        let rotation = UnitQuaternion::rotation_between(&Vec3::z(), &d)
            .unwrap_or_else(|| UnitQuaternion::from_axis_angle(&Vec3::x_axis(), std::f64::consts::PI));
        Self::new(
            Shape::Capsule { radius, length },
            Transform::new(rotation, (a + b) * 0.5),
        )
    }

    pub fn cuboid(center: Vec3, size: Vec3) -> Result<Self> {
        Self::new(Shape::Box { size }, Transform::from_translation(center))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn pose(&self) -> &Transform {
        &self.pose
    }

    /// The primitive moved by `t` (pose becomes `t ∘ pose`).
    pub fn transformed(&self, t: &Transform) -> Primitive {
        Primitive {
            shape: self.shape,
            pose: t.compose(&self.pose),
        }
    }

    /// Radius of a ball about the pose origin enclosing the primitive.
    pub fn bounding_radius(&self) -> f64 {
        match self.shape {
            Shape::Sphere { radius } => radius,
            Shape::Capsule { radius, length } => radius + 0.5 * length,
            Shape::Box { size } => 0.5 * size.norm(),
        }
    }

    pub fn center(&self) -> Vec3 {
        self.pose.translation()
    }
}
