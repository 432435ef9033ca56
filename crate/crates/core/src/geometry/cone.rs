use nalgebra::Unit;

use super::{Transform, Vec3};
use crate::error::{Error, Result};

/// Boundary contacts closer than this count as intersecting.
pub const GRAZING_TOLERANCE: f64 = 1e-9;

/// A finite, flat-capped visibility cone.
///
/// The solid is every point `p` with `0 ≤ h ≤ range` and radial offset
/// `ρ ≤ h·tan(half_angle)`, where `h` is the projection of `p − apex` on the
/// axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cone {
    apex: Vec3,
    axis: Unit<Vec3>,
    half_angle: f64,
    range: f64,
}

impl Cone {
    pub fn new(apex: Vec3, axis: Vec3, half_angle: f64, range: f64) -> Result<Self> {
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::validation(
                "cone.half_angle",
                format!("must lie in (0, π/2) radians, got {half_angle}"),
            ));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::validation(
                "cone.range",
                format!("must be positive, got {range}"),
            ));
        }
        let norm = axis.norm();
        if !(norm > 1e-12 && norm.is_finite()) {
            return Err(Error::validation("cone.axis", "must be a nonzero vector"));
        }
        Ok(Self {
            apex,
            axis: Unit::new_normalize(axis),
            half_angle,
            range,
        })
    }

    pub fn apex(&self) -> Vec3 {
        self.apex
    }

    pub fn axis(&self) -> Vec3 {
        self.axis.into_inner()
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn with_range(&self, range: f64) -> Result<Self> {
        Self::new(self.apex, self.axis(), self.half_angle, range)
    }

    /// The cone carried by a rigid motion.
    pub fn transformed(&self, t: &Transform) -> Cone {
        Cone {
            apex: t.transform_point(&self.apex),
            axis: Unit::new_normalize(t.transform_vector(&self.axis)),
            half_angle: self.half_angle,
            range: self.range,
        }
    }

    /// Axial and radial coordinates of `p` relative to the cone.
    fn cylindrical(&self, p: &Vec3) -> (f64, f64) {
        let rel = p - self.apex;
        let h = rel.dot(&self.axis);
        let radial = (rel - self.axis.into_inner() * h).norm();
        (h, radial)
    }

    pub fn contains_point(&self, p: &Vec3) -> bool {
        self.distance_to_point(p) <= 0.0
    }

    /// Euclidean distance from `p` to the solid cone; zero inside.
    ///
    /// The solid is rotationally symmetric, so the distance equals the planar
    /// distance from `(h, ρ)` to the triangle (0,0), (R, R·tanα), (R, 0).
    pub fn distance_to_point(&self, p: &Vec3) -> f64 {
        let (h, rho) = self.cylindrical(p);
        let edge_radius = self.range * self.half_angle.tan();
        if h >= 0.0 && h <= self.range && rho <= h * self.half_angle.tan() {
            return 0.0;
        }
        let q = (h, rho);
        let lateral = segment_distance_2d(q, (0.0, 0.0), (self.range, edge_radius));
        let cap = segment_distance_2d(q, (self.range, edge_radius), (self.range, 0.0));
        lateral.min(cap)
    }
}

fn segment_distance_2d(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    (cx * cx + cy * cy).sqrt()
}

/// True iff the closed ball meets the closed finite cone.
pub fn cone_sphere_intersect(cone: &Cone, center: &Vec3, radius: f64) -> bool {
    cone.distance_to_point(center) <= radius + GRAZING_TOLERANCE
}
