//! Scene model, scene-file loading and validation, and the bundled scenarios.

pub mod format;

use std::path::Path;

use nalgebra::{Quaternion, Unit, UnitQuaternion};

use crate::error::{Error, Result};
use crate::geometry::{Primitive, Shape, Transform, Vec3};
use crate::kinematics::{Dof, JointKind, JointSpec, RobotModel, SensorMount};
use format::*;

/// A spherical privacy-sensitive region of the workspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrivacyRegion {
    pub center: Vec3,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub name: String,
    pub robot: RobotModel,
    pub obstacles: Vec<Primitive>,
    pub privacy_regions: Vec<PrivacyRegion>,
}

/// Planning defaults carried by a scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanningDefaults {
    pub roadmap_n: usize,
    pub conn_radius: f64,
    pub resolution: f64,
    pub privacy_resolution: f64,
    pub weights: Vec<f64>,
    pub runs: usize,
}

impl Default for PlanningDefaults {
    fn default() -> Self {
        Self {
            roadmap_n: 1000,
            conn_radius: 1.5,
            resolution: 0.05,
            privacy_resolution: 0.05,
            weights: vec![1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0],
            runs: 100,
        }
    }
}

/// How start/goal pairs are drawn for a scenario.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuerySampler {
    /// Uniform over the joint limits, rejected until the configuration is valid.
    UniformValid { max_attempts: usize },
}

impl Default for QuerySampler {
    fn default() -> Self {
        QuerySampler::UniformValid { max_attempts: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioBundle {
    pub scene: Scene,
    pub query_sampler: QuerySampler,
    pub defaults: PlanningDefaults,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinScenario {
    Manip1,
    Manip3,
    Nav9,
}

impl BuiltinScenario {
    pub const ALL: [BuiltinScenario; 3] = [Self::Manip1, Self::Manip3, Self::Nav9];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Manip1 => "manip_1",
            Self::Manip3 => "manip_3",
            Self::Nav9 => "nav_9",
        }
    }

    fn source(&self) -> &'static str {
        match self {
            Self::Manip1 => include_str!("../../scenarios/manip_1.json"),
            Self::Manip3 => include_str!("../../scenarios/manip_3.json"),
            Self::Nav9 => include_str!("../../scenarios/nav_9.json"),
        }
    }
}

impl std::str::FromStr for BuiltinScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

pub fn builtin_scenario(which: BuiltinScenario) -> ScenarioBundle {
    load_bundle(which.source()).expect("bundled scenario files are valid")
}

/// Parses and validates a scene document.
pub fn load_scene(text: &str) -> Result<Scene> {
    load_bundle(text).map(|b| b.scene)
}

pub fn load_scene_file(path: impl AsRef<Path>) -> Result<ScenarioBundle> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_bundle(&text)
}

/// Parses a scene document together with its planning defaults.
pub fn load_bundle(text: &str) -> Result<ScenarioBundle> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    convert_file(&file)
}

fn convert_file(file: &SceneFile) -> Result<ScenarioBundle> {
    if file.meta.format_version != SCENE_FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: file.meta.format_version,
            supported: SCENE_FORMAT_VERSION,
        });
    }
    let units = match file.meta.angle_unit.as_deref() {
        None | Some("deg") => Units::Degrees,
        Some("rad") => Units::Radians,
        Some(other) => {
            return Err(Error::validation(
                "meta.angle_unit",
                format!("expected \"deg\" or \"rad\", got \"{other}\""),
            ))
        }
    };
    let robot = convert_robot(&file.robot, units)?;
    let obstacles = file
        .obstacles
        .iter()
        .enumerate()
        .map(|(i, p)| convert_primitive(p, units, &format!("obstacles[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let privacy_regions = file
        .privacy_regions
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if !(r.radius > 0.0 && r.radius.is_finite()) {
                return Err(Error::validation(
                    format!("privacy_regions[{i}].radius"),
                    format!("must be positive, got {}", r.radius),
                ));
            }
            finite3(&r.center, &format!("privacy_regions[{i}].center"))?;
            Ok(PrivacyRegion {
                center: Vec3::from(r.center),
                radius: r.radius,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let scene = Scene {
        name: file.meta.name.clone(),
        robot,
        obstacles,
        privacy_regions,
    };
    let defaults = convert_defaults(file.meta.defaults.as_ref())?;
    Ok(ScenarioBundle {
        scene,
        query_sampler: QuerySampler::default(),
        defaults,
    })
}

fn convert_defaults(d: Option<&DefaultsFile>) -> Result<PlanningDefaults> {
    let mut out = PlanningDefaults::default();
    let Some(d) = d else { return Ok(out) };
    if let Some(n) = d.roadmap_n {
        out.roadmap_n = n;
    }
    if let Some(r) = d.conn_radius {
        positive(r, "meta.defaults.conn_radius")?;
        out.conn_radius = r;
    }
    if let Some(r) = d.resolution {
        positive(r, "meta.defaults.resolution")?;
        out.resolution = r;
        out.privacy_resolution = r;
    }
    if let Some(r) = d.privacy_resolution {
        positive(r, "meta.defaults.privacy_resolution")?;
        out.privacy_resolution = r;
    }
    if let Some(w) = &d.weights {
        if w.is_empty() || !w.contains(&1.0) {
            return Err(Error::validation(
                "meta.defaults.weights",
                "must be nonempty and contain the agnostic weight 1",
            ));
        }
        for (i, &x) in w.iter().enumerate() {
            if !(x.abs() >= 1.0 && x.is_finite()) {
                return Err(Error::validation(
                    format!("meta.defaults.weights[{i}]"),
                    format!("weight magnitude must be ≥ 1, got {x}"),
                ));
            }
        }
        out.weights = w.clone();
    }
    if let Some(r) = d.runs {
        if r == 0 {
            return Err(Error::validation("meta.defaults.runs", "must be ≥ 1"));
        }
        out.runs = r;
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Units {
    Degrees,
    Radians,
}

impl Units {
    fn angle(self, v: f64) -> f64 {
        match self {
            Units::Degrees => v.to_radians(),
            Units::Radians => v,
        }
    }
}

fn positive(v: f64, field: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be positive, got {v}")))
    }
}

fn finite3(v: &[f64; 3], field: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::validation(field, "components must be finite"))
    }
}

fn unit_vector(v: &[f64; 3], field: &str) -> Result<Unit<Vec3>> {
    finite3(v, field)?;
    let v = Vec3::from(*v);
    let n = v.norm();
    if n < 1e-9 {
        return Err(Error::validation(field, "must be a nonzero vector"));
    }
    // Already-normalized input is kept bit-exact so files round-trip.
    Ok(if (n - 1.0).abs() <= 1e-12 {
        Unit::new_unchecked(v)
    } else {
        Unit::new_normalize(v)
    })
}

fn convert_pose(p: Option<&PoseFile>, units: Units, field: &str) -> Result<Transform> {
    let Some(p) = p else {
        return Ok(Transform::identity());
    };
    let xyz = p.xyz.unwrap_or([0.0; 3]);
    finite3(&xyz, &format!("{field}.xyz"))?;
    let rotation = match (p.rpy, p.quat_wxyz) {
        (Some(_), Some(_)) => return Err(Error::validation(field, "give either rpy or quat_wxyz, not both")),
        (Some(rpy), None) => {
            finite3(&rpy, &format!("{field}.rpy"))?;
            UnitQuaternion::from_euler_angles(units.angle(rpy[0]), units.angle(rpy[1]), units.angle(rpy[2]))
        }
        (None, Some([w, x, y, z])) => {
            let q = Quaternion::new(w, x, y, z);
            let n = q.norm();
            if !n.is_finite() || (n - 1.0).abs() > 1e-6 {
                return Err(Error::validation(
                    format!("{field}.quat_wxyz"),
                    format!("must be unit-norm, got norm {n}"),
                ));
            }
            if (n - 1.0).abs() <= 1e-12 {
                UnitQuaternion::new_unchecked(q)
            } else {
                UnitQuaternion::from_quaternion(q)
            }
        }
        (None, None) => UnitQuaternion::identity(),
    };
    Ok(Transform::new(rotation, Vec3::from(xyz)))
}

fn convert_primitive(p: &PrimitiveFile, units: Units, field: &str) -> Result<Primitive> {
    let need = |v: Option<f64>, name: &str| -> Result<f64> {
        let v = v.ok_or_else(|| Error::validation(format!("{field}.{name}"), "missing"))?;
        positive(v, &format!("{field}.{name}"))?;
        Ok(v)
    };
    let shape = match p.kind.as_str() {
        "sphere" => Shape::Sphere {
            radius: need(p.radius, "radius")?,
        },
        "capsule" => Shape::Capsule {
            radius: need(p.radius, "radius")?,
            length: need(p.length, "length")?,
        },
        "box" => {
            let size = p
                .size
                .ok_or_else(|| Error::validation(format!("{field}.size"), "missing"))?;
            for (k, s) in size.iter().enumerate() {
                positive(*s, &format!("{field}.size[{k}]"))?;
            }
            Shape::Box { size: Vec3::from(size) }
        }
        other => {
            return Err(Error::validation(
                format!("{field}.type"),
                format!("unknown primitive type \"{other}\""),
            ))
        }
    };
    let pose = convert_pose(p.pose.as_ref(), units, &format!("{field}.pose"))?;
    Primitive::new(shape, pose).map_err(|e| match e {
        Error::Validation { message, .. } => Error::validation(field, message),
        other => other,
    })
}

fn convert_robot(r: &RobotFile, units: Units) -> Result<RobotModel> {
    let base = convert_pose(r.base.as_ref(), units, "robot.base")?;
    let mut joints = Vec::with_capacity(r.joints.len());
    for (i, j) in r.joints.iter().enumerate() {
        let field = format!("robot.joints[{i}]");
        let (kind, default_weights, angular): (JointKind, Vec<f64>, Vec<bool>) = match j.kind.as_str() {
            "revolute" | "prismatic" => {
                let axis = j
                    .axis
                    .as_ref()
                    .ok_or_else(|| Error::validation(format!("{field}.axis"), "missing"))?;
                let axis = unit_vector(axis, &format!("{field}.axis"))?;
                if j.kind == "revolute" {
                    (JointKind::Revolute { axis }, vec![1.0], vec![true])
                } else {
                    (JointKind::Prismatic { axis }, vec![1.0], vec![false])
                }
            }
            "planar_base" => (JointKind::PlanarBase, vec![1.0, 1.0, 0.5], vec![false, false, true]),
            other => {
                return Err(Error::validation(
                    format!("{field}.kind"),
                    format!("unknown joint kind \"{other}\""),
                ))
            }
        };
        let n = kind.dof_count();
        if j.limits.len() != n {
            return Err(Error::validation(
                format!("{field}.limits"),
                format!("{} joint needs {n} limit pairs, got {}", j.kind, j.limits.len()),
            ));
        }
        let weights = match &j.metric_weights {
            Some(w) if w.len() != n => {
                return Err(Error::validation(
                    format!("{field}.metric_weights"),
                    format!("expected {n} entries, got {}", w.len()),
                ))
            }
            Some(w) => w.clone(),
            None => default_weights,
        };
        let dofs = j
            .limits
            .iter()
            .zip(&weights)
            .zip(&angular)
            .map(|((&[lo, hi], &w), &is_angle)| {
                let conv = |v: f64| if is_angle { units.angle(v) } else { v };
                Dof::new(conv(lo), conv(hi), w)
            })
            .collect();
        let offset = convert_pose(j.offset.as_ref(), units, &format!("{field}.offset"))?;
        let collision = j
            .collision
            .iter()
            .enumerate()
            .map(|(k, p)| convert_primitive(p, units, &format!("{field}.collision[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        joints.push(JointSpec {
            name: j.name.clone(),
            kind,
            offset,
            dofs,
            collision,
        });
    }
    let s = &r.sensor;
    let half_angle = match (s.fov_deg, s.half_angle) {
        (Some(fov), None) => (fov * 0.5).to_radians(),
        (None, Some(h)) => units.angle(h),
        (Some(_), Some(_)) => {
            return Err(Error::validation(
                "robot.sensor",
                "give either fov_deg or half_angle, not both",
            ))
        }
        (None, None) => return Err(Error::validation("robot.sensor.fov_deg", "missing")),
    };
    let mount = SensorMount {
        link: s.link,
        mount: convert_pose(s.mount.as_ref(), units, "robot.sensor.mount")?,
        half_angle,
        range: s.range,
    };
    RobotModel::new(base, joints, mount)
}

fn pose_file(t: &Transform) -> PoseFile {
    let q = t.rotation().quaternion();
    PoseFile {
        xyz: Some(t.translation().into()),
        rpy: None,
        quat_wxyz: Some([q.w, q.i, q.j, q.k]),
    }
}

fn primitive_file(p: &Primitive) -> PrimitiveFile {
    let mut f = PrimitiveFile {
        name: None,
        kind: String::new(),
        radius: None,
        length: None,
        size: None,
        pose: Some(pose_file(p.pose())),
    };
    match *p.shape() {
        Shape::Sphere { radius } => {
            f.kind = "sphere".into();
            f.radius = Some(radius);
        }
        Shape::Capsule { radius, length } => {
            f.kind = "capsule".into();
            f.radius = Some(radius);
            f.length = Some(length);
        }
        Shape::Box { size } => {
            f.kind = "box".into();
            f.size = Some(size.into());
        }
    }
    f
}

fn scene_file(scene: &Scene, defaults: Option<&PlanningDefaults>) -> SceneFile {
    let robot = &scene.robot;
    let joints = robot
        .joints()
        .iter()
        .map(|j| JointFile {
            name: j.name.clone(),
            kind: j.kind.name().to_string(),
            axis: match j.kind {
                JointKind::Revolute { axis } | JointKind::Prismatic { axis } => Some(axis.into_inner().into()),
                JointKind::PlanarBase => None,
            },
            offset: Some(pose_file(&j.offset)),
            limits: j.dofs.iter().map(|d| [d.lower, d.upper]).collect(),
            metric_weights: Some(j.dofs.iter().map(|d| d.weight).collect()),
            collision: j.collision.iter().map(primitive_file).collect(),
        })
        .collect();
    let s = robot.sensor();
    SceneFile {
        meta: MetaFile {
            format_version: SCENE_FORMAT_VERSION,
            name: scene.name.clone(),
            angle_unit: Some("rad".into()),
            description: None,
            defaults: defaults.map(|d| DefaultsFile {
                roadmap_n: Some(d.roadmap_n),
                conn_radius: Some(d.conn_radius),
                resolution: Some(d.resolution),
                privacy_resolution: Some(d.privacy_resolution),
                weights: Some(d.weights.clone()),
                runs: Some(d.runs),
            }),
        },
        robot: RobotFile {
            base: Some(pose_file(robot.base())),
            joints,
            sensor: SensorFile {
                link: s.link,
                mount: Some(pose_file(&s.mount)),
                fov_deg: None,
                half_angle: Some(s.half_angle),
                range: s.range,
            },
        },
        obstacles: scene.obstacles.iter().map(primitive_file).collect(),
        privacy_regions: scene
            .privacy_regions
            .iter()
            .map(|r| PrivacyRegionFile {
                center: r.center.into(),
                radius: r.radius,
            })
            .collect(),
    }
}

/// Serializes a scene in the same format `load_scene` reads (angles in radians).
pub fn scene_to_json(scene: &Scene) -> String {
    serde_json::to_string_pretty(&scene_file(scene, None)).expect("scene serializes")
}

pub fn bundle_to_json(bundle: &ScenarioBundle) -> String {
    serde_json::to_string_pretty(&scene_file(&bundle.scene, Some(&bundle.defaults))).expect("scene serializes")
}
