//! On-disk JSON schema for scene files (`format_version` 1).
//!
//! These types mirror the file one-to-one; conversion to the validated
//! domain model lives in the parent module.

use serde::{Deserialize, Serialize};

pub const SCENE_FORMAT_VERSION: i64 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub meta: MetaFile,
    pub robot: RobotFile,
    #[serde(default)]
    pub obstacles: Vec<PrimitiveFile>,
    #[serde(default)]
    pub privacy_regions: Vec<PrivacyRegionFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaFile {
    pub format_version: i64,
    #[serde(default)]
    pub name: String,
    /// `"deg"` (default) or `"rad"`; applies to every angle in the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defaults: Option<DefaultsFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefaultsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roadmap_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conn_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub privacy_resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xyz: Option<[f64; 3]>,
    /// Fixed-axis roll, pitch, yaw in `angle_unit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rpy: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quat_wxyz: Option<[f64; 4]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<PoseFile>,
    pub joints: Vec<JointFile>,
    pub sensor: SensorFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    #[serde(default)]
    pub name: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<PoseFile>,
    /// One `[lower, upper]` per scalar DOF. Angles in `angle_unit`, lengths in meters.
    pub limits: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub collision: Vec<PrimitiveFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorFile {
    pub link: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mount: Option<PoseFile>,
    /// Full field of view in degrees, regardless of `angle_unit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fov_deg: Option<f64>,
    /// Half-angle in `angle_unit`; exclusive with `fov_deg`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_angle: Option<f64>,
    pub range: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrivacyRegionFile {
    pub center: [f64; 3],
    pub radius: f64,
}
