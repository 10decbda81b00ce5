//! Trackers and verifiers that play back recorded logs.
//!
//! Replayed trackers cannot react to corrections, so they declare neither
//! hook capability.

use std::sync::Arc;

use crate::geometry::BBox;
use crate::formats::TrackerLog;
use crate::tracker_api::{
    FrameCursor, FrameHandle, Tracker, TrackerCapabilities, TrackerError, TrackerOutput, Verifier,
};

pub struct ReplayTracker {
    log: Arc<TrackerLog>,
    cursor: FrameCursor,
}

impl ReplayTracker {
    pub fn new(log: Arc<TrackerLog>) -> Self {
        Self {
            log,
            cursor: FrameCursor::default(),
        }
    }
}

impl Tracker for ReplayTracker {
    fn name(&self) -> &str {
        &self.log.name
    }

    fn capabilities(&self) -> TrackerCapabilities {
        TrackerCapabilities::default()
    }

    fn init(&mut self, frame: &FrameHandle, _bbox: BBox) -> Result<(), TrackerError> {
        self.cursor.init(frame)
    }

    fn step(&mut self, frame: &FrameHandle) -> Result<TrackerOutput, TrackerError> {
        self.cursor.advance(frame)?;
        self.log
            .records
            .get(frame.index)
            .map(|r| r.output)
            .ok_or(TrackerError::MissingRecord(frame.index))
    }

    fn reset(&mut self) {
        self.cursor.reset();
    }
}

/// Looks up the precomputed verifier score stored next to the box that is
/// being scored.
pub struct ReplayVerifier {
    logs: Vec<Arc<TrackerLog>>,
}

impl ReplayVerifier {
    pub fn new(logs: Vec<Arc<TrackerLog>>) -> Self {
        Self { logs }
    }
}

impl Verifier for ReplayVerifier {
    fn score(&mut self, frame: &FrameHandle, bbox: &BBox) -> Result<f64, TrackerError> {
        self.logs
            .iter()
            .filter_map(|l| l.records.get(frame.index))
            .find(|r| r.output.bbox == *bbox)
            .and_then(|r| r.verifier_score)
            .ok_or(TrackerError::MissingScore {
                frame: frame.index,
                bbox: *bbox,
            })
    }
}
