//! Privacy-aware motion planning.
//!
//! A robot carrying a camera moves through a scene containing spherical
//! privacy regions. A configuration *violates* privacy when the camera's
//! finite visibility cone meets any region. Planning uses a radius-connected
//! roadmap whose edges cache their violating arc length, so a privacy weight
//! `w` (with `|w| ≥ 1`) re-weights the whole graph in one pass:
//!
//! * `w = 1`: plain path length (privacy-agnostic);
//! * `w > 1`: violating length costs `w×`, clean length `1/w×` (preserving);
//! * `w < −1`: violating length costs `1/|w|×`, clean length `|w|×` (violating).
//!
//! The [`experiment`] module sweeps weights over seeded start/goal pairs and
//! reports the violation fraction and length of each solution.

pub mod error;
pub mod experiment;
pub mod geometry;
pub mod kinematics;
pub mod planner;
pub mod privacy;
pub mod rng;
pub mod scene;
pub mod validity;

pub use error::{Error, Result};
pub use geometry::{cone_sphere_intersect, primitive_pair_distance, Cone, Primitive, Shape, Transform, Vec3};
pub use kinematics::{interpolate, Config, Dof, JointKind, JointSpec, RobotModel, SensorMount};
pub use planner::{
    build_roadmap, connect_query, edge_weight, load_roadmap, query, save_roadmap, solve, Edge, PathSolution, Roadmap,
    RoadmapParams,
};
pub use privacy::{
    classify_path, privacy_cost, privacy_violated, violation_fraction, CostProfile, PrivacyMode, SegmentClassification,
    Subsegment,
};
pub use scene::{
    builtin_scenario, load_scene, scene_to_json, BuiltinScenario, PlanningDefaults, PrivacyRegion, ScenarioBundle,
    Scene,
};
pub use validity::ValidityChecker;
