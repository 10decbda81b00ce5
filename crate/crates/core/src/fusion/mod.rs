//! Two-tracker fusion: the evaluate-select-correct controller and the simple
//! baseline strategies it is compared against.

mod baseline;
mod config;
mod controller;
mod presence;

use std::fmt;

use thiserror::Error;

use crate::geometry::{aspect_ratio, BBox};
use crate::tracker_api::{FrameHandle, TrackerError, TrackerOutput};

pub use baseline::{
    baseline_average, baseline_max_confidence, BaselineFusion, BaselineKind, BaselineOutput,
    SingleTracker,
};
pub use config::{CombinationMode, ControllerConfig, CONTROLLER_KEYS};
pub use controller::{Controller, FusedOutput, FusionState, TrackerDiagnostics};
pub use presence::{
    binarize, combine_confidence, vote_threshold, window_presence, PresenceWindow,
};

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("invalid controller configuration: {0}")]
    Config(String),
    #[error("{slot} failed on frame {frame}: {source}")]
    Adapter {
        frame: usize,
        slot: String,
        #[source]
        source: TrackerError,
    },
}

impl FusionError {
    pub(crate) fn adapter(frame: usize, slot: impl fmt::Display, source: TrackerError) -> Self {
        FusionError::Adapter {
            frame,
            slot: slot.to_string(),
            source,
        }
    }
}

/// One of the two fused trackers. Tracker 1 is the spatially accurate one
/// and wins ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrackerSlot {
    First,
    Second,
}

impl TrackerSlot {
    pub fn id(self) -> u8 {
        match self {
            TrackerSlot::First => 1,
            TrackerSlot::Second => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            TrackerSlot::First => TrackerSlot::Second,
            TrackerSlot::Second => TrackerSlot::First,
        }
    }

    pub fn index(self) -> usize {
        self.id() as usize - 1
    }
}

impl fmt::Display for TrackerSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tracker {}", self.id())
    }
}

/// Which tracker's box becomes the fused output, given windowed presence.
///
/// | p1 | p2 | selected |
/// |----|----|----------|
/// | 1  | 1  | 1        |
/// | 1  | 0  | 1        |
/// | 0  | 1  | 2        |
/// | 0  | 0  | 1        |
pub fn select_box(p1: bool, p2: bool) -> TrackerSlot {
    if !p1 && p2 {
        TrackerSlot::Second
    } else {
        TrackerSlot::First
    }
}

/// True when the aspect-ratio change from `previous` to `current` leaves
/// `band`, i.e. tracker 1's confidence must be forced to zero.
pub fn aspect_penalty_triggered(previous: &BBox, current: &BBox, band: (f64, f64)) -> bool {
    let ratio = aspect_ratio(previous) / aspect_ratio(current);
    ratio < band.0 || ratio > band.1
}

/// Tracker 1's confidence after the optional aspect-ratio penalty.
pub fn apply_aspect_penalty(
    previous: Option<&BBox>,
    current: &TrackerOutput,
    band: (f64, f64),
) -> f64 {
    match previous {
        Some(prev) if aspect_penalty_triggered(prev, &current.bbox, band) => 0.0,
        _ => current.confidence,
    }
}

/// Counters of hook invocations during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HookStats {
    pub overrides_applied: u64,
    pub overrides_unsupported: u64,
    pub scale_calls: u64,
    pub scale_unsupported: u64,
    pub verifier_updates: u64,
    pub aspect_penalties: u64,
}

impl HookStats {
    /// Correction was requested but no tracker could honor it.
    pub fn correction_degraded(&self) -> bool {
        self.overrides_unsupported > 0 && self.overrides_applied == 0
    }

    pub fn add(&mut self, other: &HookStats) {
        self.overrides_applied += other.overrides_applied;
        self.overrides_unsupported += other.overrides_unsupported;
        self.scale_calls += other.scale_calls;
        self.scale_unsupported += other.scale_unsupported;
        self.verifier_updates += other.verifier_updates;
        self.aspect_penalties += other.aspect_penalties;
    }

    pub fn entries(&self) -> [(&'static str, u64); 6] {
        [
            ("overrides_applied", self.overrides_applied),
            ("overrides_unsupported", self.overrides_unsupported),
            ("scale_calls", self.scale_calls),
            ("scale_unsupported", self.scale_unsupported),
            ("verifier_updates", self.verifier_updates),
            ("aspect_penalties", self.aspect_penalties),
        ]
    }
}

/// One frame of a fusion pipeline's output, in a shape shared by the
/// controller, the baselines and single trackers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineStep {
    pub output: TrackerOutput,
    pub presence: bool,
    pub raw_confidences: [Option<f64>; 2],
}

/// Anything that turns a frame stream into one box and confidence per frame.
pub trait FusionPipeline: Send {
    fn init(&mut self, frame: &FrameHandle, bbox: BBox) -> Result<(), FusionError>;
    fn step(&mut self, frame: &FrameHandle) -> Result<PipelineStep, FusionError>;
    fn stats(&self) -> HookStats;
}
