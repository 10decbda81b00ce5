//! Comparison strategies: coordinate averaging and max-confidence selection,
//! each with an optional correction step, plus a single tracker run alone.

use crate::geometry::BBox;
use crate::tracker_api::{FrameHandle, HookOutcome, Tracker, TrackerOutput};

use super::{FusionError, FusionPipeline, HookStats, PipelineStep, TrackerSlot};

/// Presence threshold applied to the (continuous) baseline confidence.
const PRESENCE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineOutput {
    pub output: TrackerOutput,
    pub presence: bool,
    /// Tracker whose box was taken verbatim, `None` for blends.
    pub winner: Option<TrackerSlot>,
}

/// Coordinate-wise mean of both boxes and mean of both confidences.
pub fn baseline_average(a: &TrackerOutput, b: &TrackerOutput) -> BaselineOutput {
    let (pa, pb) = (a.bbox.to_array(), b.bbox.to_array());
    let m: [f64; 4] = std::array::from_fn(|i| (pa[i] + pb[i]) / 2.0);
    // the mean of two valid boxes is valid
    let bbox = BBox::new(m[0], m[1], m[2], m[3]).expect("mean of valid boxes");
    let confidence = (a.confidence + b.confidence) / 2.0;
    BaselineOutput {
        output: TrackerOutput { bbox, confidence },
        presence: confidence >= PRESENCE_THRESHOLD,
        winner: None,
    }
}

/// Box and confidence of the more confident tracker; ties go to tracker 1.
pub fn baseline_max_confidence(a: &TrackerOutput, b: &TrackerOutput) -> BaselineOutput {
    let (winner, out) = if b.confidence > a.confidence {
        (TrackerSlot::Second, *b)
    } else {
        (TrackerSlot::First, *a)
    };
    BaselineOutput {
        output: out,
        presence: out.confidence >= PRESENCE_THRESHOLD,
        winner: Some(winner),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Average { correct_both: bool },
    MaxConfidence { correct_other: bool },
}

/// Runs two trackers under one of the baseline strategies.
pub struct BaselineFusion {
    kind: BaselineKind,
    trackers: [Box<dyn Tracker>; 2],
    stats: HookStats,
    last_raw: [f64; 2],
}

impl BaselineFusion {
    pub fn new(kind: BaselineKind, tracker1: Box<dyn Tracker>, tracker2: Box<dyn Tracker>) -> Self {
        Self {
            kind,
            trackers: [tracker1, tracker2],
            stats: HookStats::default(),
            last_raw: [0.0; 2],
        }
    }

    pub fn step_baseline(&mut self, frame: &FrameHandle) -> Result<BaselineOutput, FusionError> {
        let o1 = self.trackers[0]
            .step(frame)
            .map_err(|e| FusionError::adapter(frame.index, TrackerSlot::First, e))?;
        let o2 = self.trackers[1]
            .step(frame)
            .map_err(|e| FusionError::adapter(frame.index, TrackerSlot::Second, e))?;
        let (fused, targets): (BaselineOutput, Vec<TrackerSlot>) = match self.kind {
            BaselineKind::Average { correct_both } => {
                let f = baseline_average(&o1, &o2);
                let t = if correct_both {
                    vec![TrackerSlot::First, TrackerSlot::Second]
                } else {
                    vec![]
                };
                (f, t)
            }
            BaselineKind::MaxConfidence { correct_other } => {
                let f = baseline_max_confidence(&o1, &o2);
                let t = match (correct_other, f.winner) {
                    (true, Some(w)) => vec![w.other()],
                    _ => vec![],
                };
                (f, t)
            }
        };
        for slot in targets {
            let outcome = self.trackers[slot.index()]
                .override_state(fused.output.bbox)
                .map_err(|e| FusionError::adapter(frame.index, slot, e))?;
            match outcome {
                HookOutcome::Applied => self.stats.overrides_applied += 1,
                HookOutcome::Unsupported => self.stats.overrides_unsupported += 1,
            }
        }
        self.last_raw = [o1.confidence, o2.confidence];
        Ok(fused)
    }
}

impl FusionPipeline for BaselineFusion {
    fn init(&mut self, frame: &FrameHandle, bbox: BBox) -> Result<(), FusionError> {
        for (i, t) in self.trackers.iter_mut().enumerate() {
            let slot = if i == 0 { TrackerSlot::First } else { TrackerSlot::Second };
            t.init(frame, bbox)
                .map_err(|e| FusionError::adapter(frame.index, slot, e))?;
        }
        Ok(())
    }

    fn step(&mut self, frame: &FrameHandle) -> Result<PipelineStep, FusionError> {
        let f = self.step_baseline(frame)?;
        Ok(PipelineStep {
            output: f.output,
            presence: f.presence,
            raw_confidences: self.last_raw.map(Some),
        })
    }

    fn stats(&self) -> HookStats {
        self.stats.clone()
    }
}

/// One tracker on its own, scored on its raw output.
pub struct SingleTracker {
    slot: TrackerSlot,
    tracker: Box<dyn Tracker>,
}

impl SingleTracker {
    pub fn new(slot: TrackerSlot, tracker: Box<dyn Tracker>) -> Self {
        Self { slot, tracker }
    }
}

impl FusionPipeline for SingleTracker {
    fn init(&mut self, frame: &FrameHandle, bbox: BBox) -> Result<(), FusionError> {
        self.tracker
            .init(frame, bbox)
            .map_err(|e| FusionError::adapter(frame.index, self.slot, e))
    }

    fn step(&mut self, frame: &FrameHandle) -> Result<PipelineStep, FusionError> {
        let out = self
            .tracker
            .step(frame)
            .map_err(|e| FusionError::adapter(frame.index, self.slot, e))?;
        let mut raw = [None, None];
        raw[self.slot.index()] = Some(out.confidence);
        Ok(PipelineStep {
            output: out,
            presence: out.confidence >= PRESENCE_THRESHOLD,
            raw_confidences: raw,
        })
    }

    fn stats(&self) -> HookStats {
        HookStats::default()
    }
}
