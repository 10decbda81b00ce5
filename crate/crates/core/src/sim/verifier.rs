use std::sync::Arc;

use crate::geometry::{iou, BBox};
use crate::tracker_api::{FrameHandle, TrackerError, Verifier};

use super::rng::SimRng;
use super::world::World;
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreSmoothing {
    /// 0/1 indicator of `iou >= iou_threshold`.
    Hard,
    /// Logistic in IoU centered on the threshold, rescaled so that IoU 0
    /// maps to 0 and IoU 1 maps to 1.
    Logistic { steepness: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedVerifierProfile {
    pub iou_threshold: f64,
    /// Probability of reporting the ideal answer.
    pub accuracy: f64,
    pub smoothing: ScoreSmoothing,
}

impl Default for ScriptedVerifierProfile {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            accuracy: 0.9,
            smoothing: ScoreSmoothing::Logistic { steepness: 12.0 },
        }
    }
}

impl ScriptedVerifierProfile {
    pub fn ideal() -> Self {
        Self {
            iou_threshold: 0.5,
            accuracy: 1.0,
            smoothing: ScoreSmoothing::Hard,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let steep_ok = match self.smoothing {
            ScoreSmoothing::Hard => true,
            ScoreSmoothing::Logistic { steepness } => steepness > 0.0 && steepness.is_finite(),
        };
        if (0.0..=1.0).contains(&self.accuracy)
            && self.iou_threshold > 0.0
            && self.iou_threshold <= 1.0
            && steep_ok
        {
            Ok(())
        } else {
            Err(SimError::InvalidProfile("verifier".into()))
        }
    }

    /// Noise-free score for a box with overlap `overlap` against a visible
    /// target.
    pub fn ideal_score(&self, overlap: f64) -> f64 {
        match self.smoothing {
            ScoreSmoothing::Hard => {
                if overlap >= self.iou_threshold {
                    1.0
                } else {
                    0.0
                }
            }
            ScoreSmoothing::Logistic { steepness } => {
                let f = |x: f64| 1.0 / (1.0 + (-steepness * (x - self.iou_threshold)).exp());
                let (lo, hi) = (f(0.0), f(1.0));
                ((f(overlap) - lo) / (hi - lo)).clamp(0.0, 1.0)
            }
        }
    }
}

/// Verifier that reads the hidden target and answers correctly with
/// probability `accuracy`; a wrong answer is the complement of the ideal one.
pub struct ScriptedVerifier {
    profile: ScriptedVerifierProfile,
    world: Arc<World>,
    rng: SimRng,
    updates: usize,
}

impl ScriptedVerifier {
    pub fn new(
        profile: ScriptedVerifierProfile,
        world: Arc<World>,
        seed: u64,
        stream: &str,
    ) -> Result<Self, SimError> {
        profile.validate()?;
        Ok(Self {
            profile,
            world,
            rng: SimRng::new(seed, stream),
            updates: 0,
        })
    }

    pub fn profile(&self) -> &ScriptedVerifierProfile {
        &self.profile
    }

    /// Number of update calls received (they do not change the scores).
    pub fn update_count(&self) -> usize {
        self.updates
    }
}

impl Verifier for ScriptedVerifier {
    fn score(&mut self, frame: &FrameHandle, bbox: &BBox) -> Result<f64, TrackerError> {
        let t = frame.payload as usize;
        let wf = self.world.frame(t).ok_or(TrackerError::MissingRecord(t))?;
        let ideal = wf
            .target
            .map_or(0.0, |g| self.profile.ideal_score(iou(bbox, &g)));
        if self.rng.chance(1.0 - self.profile.accuracy) {
            Ok(1.0 - ideal)
        } else {
            Ok(ideal)
        }
    }

    fn update(&mut self, _frame: &FrameHandle, _bbox: &BBox) -> Result<(), TrackerError> {
        self.updates += 1;
        Ok(())
    }
}
