//! Privacy predicate, path classification, and the weighted privacy costs.
//!
//! A profile with weight `w` scales arc length per subsegment:
//!
//! | weight      | violating subsegment | clean subsegment |
//! |-------------|----------------------|------------------|
//! | `|w| = 1`   | `len`                | `len`            |
//! | `w > 1`     | `w·len`              | `len/w`          |
//! | `w < −1`    | `len/|w|`            | `|w|·len`        |
//!
//! The cone sees through obstacles; occlusion is not modeled.

use crate::error::{Error, Result};
use crate::geometry::cone_sphere_intersect;
use crate::kinematics::{lerp, Config};
use crate::scene::Scene;
use crate::validity::canonical_order;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrivacyMode {
    Agnostic,
    Preserving,
    Violating,
}

/// A privacy weight with `|w| ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostProfile {
    weight: f64,
}

impl CostProfile {
    pub fn new(weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight.abs() >= 1.0) {
            return Err(Error::InvalidWeight(weight));
        }
        Ok(Self { weight })
    }

    pub fn agnostic() -> Self {
        Self { weight: 1.0 }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mode(&self) -> PrivacyMode {
        if self.weight.abs() == 1.0 {
            PrivacyMode::Agnostic
        } else if self.weight > 1.0 {
            PrivacyMode::Preserving
        } else {
            PrivacyMode::Violating
        }
    }

    /// Multipliers applied to (violating, clean) arc length.
    pub fn factors(&self) -> (f64, f64) {
        let w = self.weight.abs();
        match self.mode() {
            PrivacyMode::Agnostic => (1.0, 1.0),
            PrivacyMode::Preserving => (w, 1.0 / w),
            PrivacyMode::Violating => (1.0 / w, w),
        }
    }

    /// Cost of `violating` plus `clean` arc length under this profile.
    pub fn weigh(&self, violating: f64, clean: f64) -> f64 {
        match self.mode() {
            PrivacyMode::Agnostic => violating + clean,
            _ => {
                let (fv, fc) = self.factors();
                fv * violating + fc * clean
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Subsegment {
    pub length: f64,
    pub violating: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentClassification {
    pub segments: Vec<Subsegment>,
}

impl SegmentClassification {
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).fold(0.0, |acc, l| acc + l)
    }

    pub fn violating_length(&self) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.violating)
            .map(|s| s.length)
            .fold(0.0, |acc, l| acc + l)
    }
}

/// True when the posed sensor cone meets any privacy region.
pub fn privacy_violated(scene: &Scene, q: &Config) -> Result<bool> {
    scene.robot.check_dim(q)?;
    Ok(violated_unchecked(scene, q))
}

pub(crate) fn violated_unchecked(scene: &Scene, q: &[f64]) -> bool {
    if scene.privacy_regions.is_empty() {
        return false;
    }
    let cone = scene.robot.cone_unchecked(q);
    scene
        .privacy_regions
        .iter()
        .any(|r| cone_sphere_intersect(&cone, &r.center, r.radius))
}

/// Splits each edge into `⌈len/δ_p⌉` equal subsegments labeled at their midpoints.
pub fn classify_path(scene: &Scene, path: &[Config], resolution: f64) -> Result<SegmentClassification> {
    if path.len() < 2 {
        return Err(Error::PathTooShort(path.len()));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidResolution(resolution));
    }
    for q in path {
        scene.robot.check_dim(q)?;
    }
    let mut segments = Vec::new();
    for w in path.windows(2) {
        classify_edge_into(scene, &w[0], &w[1], resolution, &mut segments);
    }
    Ok(SegmentClassification { segments })
}

/// Appends the subsegments of edge `a → b`. Labels are computed in canonical
/// endpoint order so both traversal directions agree bit-for-bit.
pub(crate) fn classify_edge_into(scene: &Scene, a: &[f64], b: &[f64], resolution: f64, out: &mut Vec<Subsegment>) {
    let len = scene.robot.distance_unchecked(a, b);
    if len == 0.0 {
        return;
    }
    let (ca, cb) = canonical_order(a, b);
    let reversed = !std::ptr::eq(ca, a);
    let m = (len / resolution).ceil().max(1.0) as usize;
    let piece = len / m as f64;
    let start = out.len();
    out.extend((0..m).map(|k| Subsegment {
        length: piece,
        violating: violated_unchecked(scene, &lerp(ca, cb, (k as f64 + 0.5) / m as f64)),
    }));
    if reversed {
        out[start..].reverse();
    }
}

/// (violating length, total length) of a single edge.
pub(crate) fn edge_partition(scene: &Scene, a: &[f64], b: &[f64], resolution: f64) -> (f64, f64) {
    let mut segs = Vec::new();
    classify_edge_into(scene, a, b, resolution, &mut segs);
    let violating: f64 = segs
        .iter()
        .filter(|s| s.violating)
        .map(|s| s.length)
        .fold(0.0, |acc, l| acc + l);
    let total = scene.robot.distance_unchecked(a, b);
    (violating.min(total), total)
}

pub fn privacy_cost(classification: &SegmentClassification, profile: &CostProfile) -> f64 {
    let (fv, fc) = profile.factors();
    classification
        .segments
        .iter()
        .map(|s| if s.violating { fv * s.length } else { fc * s.length })
        .fold(0.0, |acc, c| acc + c)
}

/// Arc-length fraction of the path whose cone meets a privacy region; 0 for empty paths.
pub fn violation_fraction(classification: &SegmentClassification) -> f64 {
    let total = classification.total_length();
    if total <= 0.0 {
        return 0.0;
    }
    (classification.violating_length() / total).clamp(0.0, 1.0)
}
