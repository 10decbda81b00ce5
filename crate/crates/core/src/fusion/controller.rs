use crate::geometry::BBox;
use crate::tracker_api::{FrameHandle, HookOutcome, Tracker, TrackerError, TrackerOutput, Verifier};

use super::presence::{binarize, combine_confidence, PresenceWindow};
use super::{
    aspect_penalty_triggered, select_box, CombinationMode, ControllerConfig, FusionError,
    FusionPipeline, HookStats, PipelineStep, TrackerSlot,
};

/// Per-tracker intermediate values of one controller step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerDiagnostics {
    pub output: TrackerOutput,
    /// Confidence after the aspect-ratio penalty (equal to the raw
    /// confidence when the penalty is off or did not fire).
    pub confidence: f64,
    pub penalized: bool,
    pub verifier: f64,
    pub combined: f64,
    pub frame_bit: bool,
    pub presence: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedOutput {
    pub bbox: BBox,
    /// Windowed presence of the selected tracker, 0 or 1.
    pub confidence: f64,
    pub selected: TrackerSlot,
    pub diagnostics: [TrackerDiagnostics; 2],
}

impl FusedOutput {
    pub fn presence(&self) -> bool {
        self.confidence > 0.5
    }
}

/// Everything the controller remembers between frames.
#[derive(Debug, Clone)]
pub struct FusionState {
    pub windows: [PresenceWindow; 2],
    pub last_box: Option<BBox>,
    pub last_presence: bool,
    pub selected: TrackerSlot,
    pub frames_since_update: usize,
}

impl FusionState {
    fn new(window: usize) -> Self {
        Self {
            windows: [PresenceWindow::new(window), PresenceWindow::new(window)],
            last_box: None,
            last_presence: false,
            selected: TrackerSlot::First,
            frames_since_update: 0,
        }
    }
}

/// Runs two trackers and a verifier, selects the fused box each frame and
/// feeds the decision back to the trackers.
pub struct Controller {
    config: ControllerConfig,
    trackers: [Box<dyn Tracker>; 2],
    verifier: Box<dyn Verifier>,
    state: FusionState,
    stats: HookStats,
}

impl Controller {
    pub fn new(
        config: ControllerConfig,
        tracker1: Box<dyn Tracker>,
        tracker2: Box<dyn Tracker>,
        verifier: Box<dyn Verifier>,
    ) -> Result<Self, FusionError> {
        config.validate()?;
        let state = FusionState::new(config.window);
        Ok(Self {
            config,
            trackers: [tracker1, tracker2],
            verifier,
            state,
            stats: HookStats::default(),
        })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn state(&self) -> &FusionState {
        &self.state
    }

    pub fn stats(&self) -> &HookStats {
        &self.stats
    }

    pub fn tracker(&self, slot: TrackerSlot) -> &dyn Tracker {
        self.trackers[slot.index()].as_ref()
    }

    /// Initializes both trackers on frame 0. The verifier receives its first
    /// update with the initial box, which starts the update interval.
    pub fn init(&mut self, frame: &FrameHandle, bbox: BBox) -> Result<(), FusionError> {
        for (i, t) in self.trackers.iter_mut().enumerate() {
            t.init(frame, bbox)
                .map_err(|e| FusionError::adapter(frame.index, slot_of(i), e))?;
        }
        self.verifier
            .update(frame, &bbox)
            .map_err(|e| FusionError::adapter(frame.index, "verifier", e))?;
        self.stats.verifier_updates += 1;
        self.state = FusionState::new(self.config.window);
        self.state.last_box = Some(bbox);
        self.state.last_presence = true;
        Ok(())
    }

    fn step_trackers(
        &mut self,
        frame: &FrameHandle,
    ) -> Result<[TrackerOutput; 2], FusionError> {
        let [t1, t2] = &mut self.trackers;
        let (r1, r2) = if self.config.parallel_trackers {
            rayon::join(|| t1.step(frame), || t2.step(frame))
        } else {
            (t1.step(frame), t2.step(frame))
        };
        let o1 = r1.map_err(|e| FusionError::adapter(frame.index, TrackerSlot::First, e))?;
        let o2 = r2.map_err(|e| FusionError::adapter(frame.index, TrackerSlot::Second, e))?;
        Ok([o1, o2])
    }

    pub fn step(&mut self, frame: &FrameHandle) -> Result<FusedOutput, FusionError> {
        let outputs = self.step_trackers(frame)?;
        let cfg = &self.config;

        let mut confidences = [outputs[0].confidence, outputs[1].confidence];
        let mut penalized = [false, false];
        if cfg.enable_aspect_penalty {
            if let Some(prev) = self.state.last_box.as_ref() {
                if aspect_penalty_triggered(prev, &outputs[0].bbox, cfg.aspect_ratio_band) {
                    penalized[0] = true;
                    confidences[0] = 0.0;
                    self.stats.aspect_penalties += 1;
                }
            }
        }

        let mut scores = [0.0; 2];
        for i in 0..2 {
            let v = self
                .verifier
                .score(frame, &outputs[i].bbox)
                .map_err(|e| FusionError::adapter(frame.index, "verifier", e))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(FusionError::adapter(
                    frame.index,
                    "verifier",
                    TrackerError::InvalidConfidence(v),
                ));
            }
            scores[i] = v;
        }

        let mut combined = [0.0; 2];
        let mut bits = [false; 2];
        let mut presence = [false; 2];
        for i in 0..2 {
            combined[i] = match cfg.combination_mode {
                CombinationMode::VerifierOnly => scores[i],
                _ => combine_confidence(confidences[i], scores[i])?,
            };
            bits[i] = binarize(combined[i], cfg.binarize_threshold);
            self.state.windows[i].push(bits[i]);
            presence[i] = match cfg.combination_mode {
                CombinationMode::Windowed => self.state.windows[i].vote(cfg.vote_fraction),
                _ => bits[i],
            };
        }

        let selected = match cfg.combination_mode {
            CombinationMode::VerifierOnly if scores[1] > scores[0] => TrackerSlot::Second,
            CombinationMode::VerifierOnly => TrackerSlot::First,
            _ => select_box(presence[0], presence[1]),
        };
        let bbox = outputs[selected.index()].bbox;
        let fused_presence = presence[selected.index()];

        let diagnostics = [0, 1].map(|i| TrackerDiagnostics {
            output: outputs[i],
            confidence: confidences[i],
            penalized: penalized[i],
            verifier: scores[i],
            combined: combined[i],
            frame_bit: bits[i],
            presence: presence[i],
        });
        let fused = FusedOutput {
            bbox,
            confidence: if fused_presence { 1.0 } else { 0.0 },
            selected,
            diagnostics,
        };

        if self.config.enable_correction && fused_presence {
            let other = selected.other();
            let outcome = self.trackers[other.index()]
                .override_state(bbox)
                .map_err(|e| FusionError::adapter(frame.index, other, e))?;
            self.record_override(outcome);
        }

        if self.config.enable_search_scale_heuristic {
            let factor = if fused_presence {
                self.config.search_scale_factor
            } else {
                1.0
            };
            let outcome = self.trackers[0]
                .set_search_scale(factor)
                .map_err(|e| FusionError::adapter(frame.index, TrackerSlot::First, e))?;
            self.stats.scale_calls += 1;
            if outcome == HookOutcome::Unsupported {
                self.stats.scale_unsupported += 1;
            }
        }

        self.state.frames_since_update += 1;
        if fused_presence && self.state.frames_since_update >= self.config.verifier_update_interval
        {
            self.verifier
                .update(frame, &bbox)
                .map_err(|e| FusionError::adapter(frame.index, "verifier", e))?;
            self.stats.verifier_updates += 1;
            self.state.frames_since_update = 0;
        }

        self.state.last_box = Some(bbox);
        self.state.last_presence = fused_presence;
        self.state.selected = selected;
        Ok(fused)
    }

    fn record_override(&mut self, outcome: HookOutcome) {
        match outcome {
            HookOutcome::Applied => self.stats.overrides_applied += 1,
            HookOutcome::Unsupported => self.stats.overrides_unsupported += 1,
        }
    }
}

fn slot_of(i: usize) -> TrackerSlot {
    if i == 0 {
        TrackerSlot::First
    } else {
        TrackerSlot::Second
    }
}

impl FusionPipeline for Controller {
    fn init(&mut self, frame: &FrameHandle, bbox: BBox) -> Result<(), FusionError> {
        Controller::init(self, frame, bbox)
    }

    fn step(&mut self, frame: &FrameHandle) -> Result<PipelineStep, FusionError> {
        let fused = Controller::step(self, frame)?;
        Ok(PipelineStep {
            output: TrackerOutput {
                bbox: fused.bbox,
                confidence: fused.confidence,
            },
            presence: fused.presence(),
            raw_confidences: [
                Some(fused.diagnostics[0].output.confidence),
                Some(fused.diagnostics[1].output.confidence),
            ],
        })
    }

    fn stats(&self) -> HookStats {
        self.stats.clone()
    }
}
