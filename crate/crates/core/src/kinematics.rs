//! Serial-chain robot model, forward kinematics, and the weighted
//! configuration-space metric.
//!
//! Link frames compose as `T_i = T_{i-1} · motion_i(q) · offset_i`, with
//! `T_{-1}` the robot base pose: each joint moves about its own frame, then a
//! fixed offset carries the frame to the next joint (the link's far end).

use nalgebra::Unit;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Cone, Primitive, Transform, Vec3};

/// A point in configuration space.
#[derive(Clone, Debug, PartialEq)]
pub struct Config(pub Vec<f64>);

impl Config {
    pub fn new(values: Vec<f64>) -> Self {
        Config(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl std::ops::Deref for Config {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Config {
    fn from(v: Vec<f64>) -> Self {
        Config(v)
    }
}

/// One scalar degree of freedom: bounded interval plus metric weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dof {
    pub lower: f64,
    pub upper: f64,
    pub weight: f64,
}

impl Dof {
    pub fn new(lower: f64, upper: f64, weight: f64) -> Self {
        Dof { lower, upper, weight }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JointKind {
    Revolute {
        axis: Unit<Vec3>,
    },
    Prismatic {
        axis: Unit<Vec3>,
    },
    /// Planar base: x, y translation then yaw about z (three scalar DOF).
    PlanarBase,
}

impl JointKind {
    pub fn dof_count(&self) -> usize {
        match self {
            JointKind::PlanarBase => 3,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            JointKind::Revolute { .. } => "revolute",
            JointKind::Prismatic { .. } => "prismatic",
            JointKind::PlanarBase => "planar_base",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointSpec {
    pub name: String,
    pub kind: JointKind,
    pub offset: Transform,
    pub dofs: Vec<Dof>,
    /// Collision geometry of the link after this joint, in link frame.
    pub collision: Vec<Primitive>,
}

impl JointSpec {
    fn motion(&self, q: &[f64]) -> Transform {
        match self.kind {
            JointKind::Revolute { axis } => Transform::from_axis_angle(&axis, q[0]),
            JointKind::Prismatic { axis } => Transform::from_translation(axis.into_inner() * q[0]),
            JointKind::PlanarBase => Transform::from_translation(Vec3::new(q[0], q[1], 0.0))
                .compose(&Transform::from_axis_angle(&Vec3::z(), q[2])),
        }
    }
}

/// Camera attachment: a fixed transform on a link. The cone looks along the
/// mount frame's +x axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorMount {
    pub link: usize,
    pub mount: Transform,
    pub half_angle: f64,
    pub range: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobotModel {
    base: Transform,
    joints: Vec<JointSpec>,
    sensor: SensorMount,
    dofs: Vec<Dof>,
    // index of each joint's first scalar in a Config
    dof_start: Vec<usize>,
}

impl RobotModel {
    pub fn new(base: Transform, joints: Vec<JointSpec>, sensor: SensorMount) -> Result<Self> {
        if joints.is_empty() {
            return Err(Error::validation("robot.joints", "at least one joint is required"));
        }
        let mut dofs = Vec::new();
        let mut dof_start = Vec::with_capacity(joints.len());
        for (i, j) in joints.iter().enumerate() {
            if j.dofs.len() != j.kind.dof_count() {
                return Err(Error::validation(
                    format!("robot.joints[{i}].limits"),
                    format!(
                        "{} joint needs {} limit pairs, got {}",
                        j.kind.name(),
                        j.kind.dof_count(),
                        j.dofs.len()
                    ),
                ));
            }
            for (k, d) in j.dofs.iter().enumerate() {
                if d.lower >= d.upper || !d.lower.is_finite() || !d.upper.is_finite() {
                    return Err(Error::validation(
                        format!("robot.joints[{i}].limits[{k}]"),
                        format!("lower must be < upper, got [{}, {}]", d.lower, d.upper),
                    ));
                }
                if !(d.weight > 0.0 && d.weight.is_finite()) {
                    return Err(Error::validation(
                        format!("robot.joints[{i}].metric_weights[{k}]"),
                        format!("must be positive, got {}", d.weight),
                    ));
                }
            }
            dof_start.push(dofs.len());
            dofs.extend_from_slice(&j.dofs);
        }
        if sensor.link >= joints.len() {
            return Err(Error::validation(
                "robot.sensor.link",
                format!("index {} out of range for {} links", sensor.link, joints.len()),
            ));
        }
        // Validates half-angle and range.
        Cone::new(Vec3::zeros(), Vec3::x(), sensor.half_angle, sensor.range).map_err(|e| match e {
            Error::Validation { field, message } => Error::validation(field.replace("cone", "robot.sensor"), message),
            other => other,
        })?;
        Ok(Self {
            base,
            joints,
            sensor,
            dofs,
            dof_start,
        })
    }

    /// Degrees of freedom `d`.
    pub fn dof(&self) -> usize {
        self.dofs.len()
    }

    pub fn dofs(&self) -> &[Dof] {
        &self.dofs
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn base(&self) -> &Transform {
        &self.base
    }

    pub fn sensor(&self) -> &SensorMount {
        &self.sensor
    }

    pub(crate) fn check_dim(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.dof() {
            return Err(Error::ConfigDimension {
                expected: self.dof(),
                got: q.len(),
            });
        }
        Ok(())
    }

    pub fn within_limits(&self, q: &[f64]) -> bool {
        q.len() == self.dof() && self.dofs.iter().zip(q).all(|(d, &v)| d.contains(v))
    }

    /// World-frame transform of every link, in chain order.
    pub fn forward_kinematics(&self, q: &Config) -> Result<Vec<Transform>> {
        self.check_dim(q)?;
        Ok(self.link_frames(q, self.joints.len()))
    }

    /// Frames of the first `count` links; `q` must already be dimension-checked.
    pub(crate) fn link_frames(&self, q: &[f64], count: usize) -> Vec<Transform> {
        let mut frames = Vec::with_capacity(count);
        let mut t = self.base;
        for (j, start) in self.joints.iter().zip(&self.dof_start).take(count) {
            let n = j.kind.dof_count();
            t = t.compose(&j.motion(&q[*start..*start + n])).compose(&j.offset);
            frames.push(t);
        }
        frames
    }

    pub fn sensor_cone_at(&self, q: &Config) -> Result<Cone> {
        self.check_dim(q)?;
        Ok(self.cone_unchecked(q))
    }

    pub(crate) fn cone_unchecked(&self, q: &[f64]) -> Cone {
        let frames = self.link_frames(q, self.sensor.link + 1);
        self.cone_from_frames(&frames)
    }

    pub(crate) fn cone_from_frames(&self, frames: &[Transform]) -> Cone {
        let pose = frames[self.sensor.link].compose(&self.sensor.mount);
        Cone::new(
            pose.translation(),
            pose.transform_vector(&Vec3::x()),
            self.sensor.half_angle,
            self.sensor.range,
        )
        .expect("mount parameters validated at construction")
    }

    /// Weighted Euclidean distance `sqrt(Σ wᵢ² (aᵢ − bᵢ)²)`.
    pub fn cspace_distance(&self, a: &Config, b: &Config) -> Result<f64> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    pub(crate) fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        self.dofs
            .iter()
            .zip(a.iter().zip(b))
            .map(|(d, (x, y))| {
                let v = d.weight * (x - y);
                v * v
            })
            .fold(0.0, |acc, s| acc + s)
            .sqrt()
    }

    /// Uniform sample over the joint-limit box.
    pub fn sample_config<R: Rng + ?Sized>(&self, rng: &mut R) -> Config {
        Config(self.dofs.iter().map(|d| rng.random_range(d.lower..=d.upper)).collect())
    }
}

/// Straight-line interpolation, `t = 0 → a`, `t = 1 → b`.
pub fn interpolate(a: &Config, b: &Config, t: f64) -> Result<Config> {
    if a.dim() != b.dim() {
        return Err(Error::ConfigDimension {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InterpolationParameter(t));
    }
    Ok(lerp(a, b, t))
}

pub(crate) fn lerp(a: &[f64], b: &[f64], t: f64) -> Config {
    if t == 1.0 {
        return Config(b.to_vec());
    }
    Config(a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect())
}
