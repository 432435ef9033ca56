//! Feasibility: joint limits plus robot-versus-obstacle collision checks.
//!
//! Self-collision is not checked, and privacy regions are not obstacles.

use crate::error::{Error, Result};
use crate::geometry::{primitive_pair_distance, Primitive};
use crate::kinematics::{lerp, Config};
use crate::scene::Scene;

pub const DEFAULT_RESOLUTION: f64 = 0.05;

#[derive(Clone, Copy, Debug)]
pub struct ValidityChecker<'a> {
    scene: &'a Scene,
    resolution: f64,
}

impl<'a> ValidityChecker<'a> {
    /// `resolution` is the largest C-space spacing between motion checks.
    pub fn new(scene: &'a Scene, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidResolution(resolution));
        }
        Ok(Self { scene, resolution })
    }

    pub fn scene(&self) -> &'a Scene {
        self.scene
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn is_config_valid(&self, q: &Config) -> Result<bool> {
        self.scene.robot.check_dim(q)?;
        Ok(self.valid_unchecked(q))
    }

    pub(crate) fn valid_unchecked(&self, q: &[f64]) -> bool {
        let robot = &self.scene.robot;
        if !robot.within_limits(q) {
            return false;
        }
        if self.scene.obstacles.is_empty() {
            return true;
        }
        let frames = robot.link_frames(q, robot.joints().len());
        for (joint, frame) in robot.joints().iter().zip(&frames) {
            for local in &joint.collision {
                let link = local.transformed(frame);
                if self.scene.obstacles.iter().any(|o| in_contact(&link, o)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_motion_valid(&self, a: &Config, b: &Config) -> Result<bool> {
        let robot = &self.scene.robot;
        robot.check_dim(a)?;
        robot.check_dim(b)?;
        Ok(self.motion_valid_unchecked(a, b, true))
    }

    /// Checks `⌈dist/δ⌉ + 1` evenly spaced configurations along the segment.
    ///
    /// Endpoints are put in lexicographic order first so the sample set, and
    /// thus the verdict, is the same in both directions.
    pub(crate) fn motion_valid_unchecked(&self, a: &[f64], b: &[f64], check_endpoints: bool) -> bool {
        let (a, b) = canonical_order(a, b);
        let robot = &self.scene.robot;
        let dist = robot.distance_unchecked(a, b);
        let intervals = (dist / self.resolution).ceil() as usize;
        if check_endpoints {
            if !self.valid_unchecked(a) {
                return false;
            }
            if intervals == 0 {
                return true;
            }
            if !self.valid_unchecked(b) {
                return false;
            }
        }
        (1..intervals).all(|i| self.valid_unchecked(&lerp(a, b, i as f64 / intervals as f64)))
    }
}

pub(crate) fn canonical_order<'x>(a: &'x [f64], b: &'x [f64]) -> (&'x [f64], &'x [f64]) {
    let swap = a.iter().zip(b).find(|(x, y)| x != y).is_some_and(|(x, y)| x > y);
    if swap {
        (b, a)
    } else {
        (a, b)
    }
}

fn in_contact(a: &Primitive, b: &Primitive) -> bool {
    // Bounding balls first; the exact query only runs when they overlap.
    let gap = (a.center() - b.center()).norm() - a.bounding_radius() - b.bounding_radius();
    gap <= 0.0 && primitive_pair_distance(a, b) <= 0.0
}
