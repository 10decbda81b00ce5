#![allow(dead_code)]

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};

use cocolot_core::tracker_api::{HookOutcome, TrackerCapabilities};
use cocolot_core::{BBox, FrameHandle, Tracker, TrackerError, TrackerOutput, Verifier};

pub fn bb(x: f64, y: f64, w: f64, h: f64) -> BBox {
    BBox::new(x, y, w, h).unwrap()
}

/// Overlap computed from the corner coordinates, independent of the library.
pub fn oracle_iou(a: &BBox, b: &BBox) -> f64 {
    let [ax, ay, aw, ah] = a.to_array();
    let [bx, by, bw, bh] = b.to_array();
    let iw = ((ax + aw).min(bx + bw) - ax.max(bx)).max(0.0);
    let ih = ((ay + ah).min(by + bh) - ay.max(by)).max(0.0);
    let inter = iw * ih;
    let union = aw * ah + bw * bh - inter;
    if union > 0.0 {
        inter / union
    } else {
        0.0
    }
}

/// Calls a stub tracker received through its hooks.
#[derive(Debug, Default)]
pub struct HookLog {
    pub overrides: Vec<BBox>,
    pub scales: Vec<f64>,
}

/// Plays a fixed list of outputs and records hook calls.
pub struct ListTracker {
    outputs: VecDeque<TrackerOutput>,
    pub hooks: Arc<Mutex<HookLog>>,
}

impl ListTracker {
    pub fn new(outputs: Vec<TrackerOutput>) -> Self {
        Self {
            outputs: outputs.into(),
            hooks: Arc::default(),
        }
    }
}

impl Tracker for ListTracker {
    fn name(&self) -> &str {
        "list"
    }

    fn capabilities(&self) -> TrackerCapabilities {
        TrackerCapabilities {
            supports_state_override: true,
            supports_search_scale: true,
        }
    }

    fn init(&mut self, _frame: &FrameHandle, _bbox: BBox) -> Result<(), TrackerError> {
        Ok(())
    }

    fn step(&mut self, frame: &FrameHandle) -> Result<TrackerOutput, TrackerError> {
        self.outputs.pop_front().ok_or(TrackerError::MissingRecord(frame.index))
    }

    fn override_state(&mut self, bbox: BBox) -> Result<HookOutcome, TrackerError> {
        self.hooks.lock().unwrap().overrides.push(bbox);
        Ok(HookOutcome::Applied)
    }

    fn set_search_scale(&mut self, factor: f64) -> Result<HookOutcome, TrackerError> {
        self.hooks.lock().unwrap().scales.push(factor);
        Ok(HookOutcome::Applied)
    }

    fn reset(&mut self) {}
}

/// Returns scores in call order and counts updates.
pub struct ListVerifier {
    scores: VecDeque<f64>,
    pub updates: Arc<Mutex<usize>>,
}

impl ListVerifier {
    pub fn new(scores: Vec<f64>) -> Self {
        Self {
            scores: scores.into(),
            updates: Arc::default(),
        }
    }
}

impl Verifier for ListVerifier {
    fn score(&mut self, frame: &FrameHandle, bbox: &BBox) -> Result<f64, TrackerError> {
        self.scores.pop_front().ok_or(TrackerError::MissingScore {
            frame: frame.index,
            bbox: *bbox,
        })
    }

    fn update(&mut self, _frame: &FrameHandle, _bbox: &BBox) -> Result<(), TrackerError> {
        *self.updates.lock().unwrap() += 1;
        Ok(())
    }
}
