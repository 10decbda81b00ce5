//! Contracts every tracker and verifier implementation satisfies.
//!
//! The fusion controller only sees these traits, so scripted simulation
//! trackers, replayed logs and user-supplied implementations are
//! interchangeable.

use thiserror::Error;

use crate::geometry::{BBox, GeometryError};

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("tracker already initialized; reset it first")]
    AlreadyInitialized,
    #[error("tracker used before initialization")]
    NotInitialized,
    #[error("initialization must happen on frame 0, got frame {0}")]
    InitFrame(usize),
    #[error("out-of-order frame: expected {expected}, got {got}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("search scale factor must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("confidence {0} outside [0, 1]")]
    InvalidConfidence(f64),
    #[error("no recorded output for frame {0}")]
    MissingRecord(usize),
    #[error("no recorded verifier score for frame {frame} and box {bbox}")]
    MissingScore { frame: usize, bbox: BBox },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Other(String),
}

/// One frame of a sequence as seen by trackers and verifiers.
///
/// `payload` is opaque to the controller. Simulation adapters use it as the
/// key into their hidden world state; replay adapters ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHandle {
    pub index: usize,
    pub payload: u64,
}

impl FrameHandle {
    pub fn new(index: usize) -> Self {
        Self { index, payload: index as u64 }
    }
}

/// A tracker's per-frame answer: where the target is and how sure it is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerOutput {
    pub bbox: BBox,
    pub confidence: f64,
}

impl TrackerOutput {
    pub fn new(bbox: BBox, confidence: f64) -> Result<Self, TrackerError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(TrackerError::InvalidConfidence(confidence));
        }
        Ok(Self { bbox, confidence })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrackerCapabilities {
    pub supports_state_override: bool,
    pub supports_search_scale: bool,
}

/// Result of an optional hook. Trackers lacking a capability report
/// `Unsupported` instead of failing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HookOutcome {
    Applied,
    Unsupported,
}

pub trait Tracker: Send {
    fn name(&self) -> &str;

    fn capabilities(&self) -> TrackerCapabilities;

    /// Starts tracking `bbox` on frame 0.
    fn init(&mut self, frame: &FrameHandle, bbox: BBox) -> Result<(), TrackerError>;

    /// Processes the next frame. Frame indices must increase by one.
    fn step(&mut self, frame: &FrameHandle) -> Result<TrackerOutput, TrackerError>;

    /// Moves the reference location used to place the next search region.
    fn override_state(&mut self, _bbox: BBox) -> Result<HookOutcome, TrackerError> {
        Ok(HookOutcome::Unsupported)
    }

    /// Sets the search-area factor as a multiple of the tracker's own
    /// baseline factor; `1.0` restores the baseline.
    fn set_search_scale(&mut self, factor: f64) -> Result<HookOutcome, TrackerError> {
        check_scale(factor)?;
        Ok(HookOutcome::Unsupported)
    }

    /// Forgets all per-sequence state so `init` can be called again.
    fn reset(&mut self);
}

/// Scores how likely it is that the target lies inside a box.
pub trait Verifier: Send {
    fn score(&mut self, frame: &FrameHandle, bbox: &BBox) -> Result<f64, TrackerError>;

    /// Online adaptation hook with the latest target location.
    fn update(&mut self, _frame: &FrameHandle, _bbox: &BBox) -> Result<(), TrackerError> {
        Ok(())
    }
}

pub fn check_scale(factor: f64) -> Result<(), TrackerError> {
    if factor.is_finite() && factor > 0.0 {
        Ok(())
    } else {
        Err(TrackerError::InvalidScale(factor))
    }
}

/// Frame bookkeeping shared by adapters: initialization once, then strictly
/// consecutive frame indices.
#[derive(Debug, Clone, Default)]
pub struct FrameCursor {
    last: Option<usize>,
}

impl FrameCursor {
    pub fn init(&mut self, frame: &FrameHandle) -> Result<(), TrackerError> {
        if self.last.is_some() {
            return Err(TrackerError::AlreadyInitialized);
        }
        if frame.index != 0 {
            return Err(TrackerError::InitFrame(frame.index));
        }
        self.last = Some(0);
        Ok(())
    }

    pub fn advance(&mut self, frame: &FrameHandle) -> Result<(), TrackerError> {
        let last = self.last.ok_or(TrackerError::NotInitialized)?;
        if frame.index != last + 1 {
            return Err(TrackerError::OutOfOrder {
                expected: last + 1,
                got: frame.index,
            });
        }
        self.last = Some(frame.index);
        Ok(())
    }

    pub fn reset(&mut self) {
        self.last = None;
    }

    pub fn last(&self) -> Option<usize> {
        self.last
    }
}
