//! Scripted trackers with configurable failure modes.
//!
//! A scripted tracker reads the hidden world state instead of pixels. Its
//! behavior is a small state machine: locked on the target, captured by a
//! distractor, or lost. Localization noise, drift, size-estimation failures,
//! distractor captures and re-detection latency are drawn from the tracker's
//! own seeded stream.

use std::sync::{Arc, Mutex};

use crate::geometry::{iou, BBox};
use crate::tracker_api::{
    check_scale, FrameCursor, FrameHandle, HookOutcome, Tracker, TrackerCapabilities,
    TrackerError, TrackerOutput,
};

use super::rng::SimRng;
use super::world::{World, WorldFrame};
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Calibration {
    /// Confidence follows the true overlap with the target.
    WellCalibrated,
    /// Confidence follows the overlap with whatever the tracker believes it
    /// is tracking, plus `bias`.
    Overconfident { bias: f64 },
    /// True overlap minus `bias`.
    Underconfident { bias: f64 },
}

/// Episodes where the estimated box size is unstable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeFailureProfile {
    pub onset_prob: f64,
    pub mean_duration: f64,
    /// Probability that a frame inside an episode is distorted.
    pub distort_prob: f64,
    /// Range of the factor one box side is stretched by.
    pub distortion: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedTrackerProfile {
    pub name: String,
    /// Standard deviation of the center jitter, pixels.
    pub center_noise: f64,
    /// Standard deviation of the log-size jitter.
    pub scale_jitter: f64,
    pub drift_onset_prob: f64,
    /// Pixels per frame.
    pub drift_rate: f64,
    /// Visible frames spent lost before global re-detection succeeds.
    pub redetect_latency: usize,
    pub calibration: Calibration,
    pub confidence_noise: f64,
    /// Per-frame capture probability while a distractor is inside the
    /// search region.
    pub distractor_susceptibility: f64,
    /// Probability of adopting a distractor that lies closer than the target
    /// to the center of an overridden search region.
    pub override_adoption: f64,
    /// Baseline search-area factor: the search region is this many times the
    /// reference box on each side.
    pub search_area: f64,
    pub size_failure: Option<SizeFailureProfile>,
    /// Random-walk step of the reported box while lost, pixels.
    pub lost_wander: f64,
    pub supports_state_override: bool,
    pub supports_search_scale: bool,
}

impl ScriptedTrackerProfile {
    /// Tight boxes, fast re-detection, unreliable confidence: overconfident,
    /// prone to distractors and to unstable size estimates.
    pub fn accurate_overconfident() -> Self {
        Self {
            name: "accurate-overconfident".into(),
            center_noise: 1.5,
            scale_jitter: 0.03,
            drift_onset_prob: 0.003,
            drift_rate: 2.0,
            redetect_latency: 12,
            calibration: Calibration::Overconfident { bias: 0.3 },
            confidence_noise: 0.08,
            distractor_susceptibility: 0.04,
            override_adoption: 0.3,
            search_area: 4.0,
            size_failure: Some(SizeFailureProfile {
                onset_prob: 0.003,
                mean_duration: 30.0,
                distort_prob: 0.6,
                distortion: (2.5, 3.5),
            }),
            lost_wander: 2.0,
            supports_state_override: true,
            supports_search_scale: true,
        }
    }

    /// Coarser boxes with confidence that tracks the actual overlap; slow to
    /// re-detect but rarely fooled by distractors.
    pub fn coarse_calibrated() -> Self {
        Self {
            name: "coarse-calibrated".into(),
            center_noise: 6.0,
            scale_jitter: 0.12,
            drift_onset_prob: 0.002,
            drift_rate: 1.5,
            redetect_latency: 30,
            calibration: Calibration::WellCalibrated,
            confidence_noise: 0.12,
            distractor_susceptibility: 0.005,
            override_adoption: 0.04,
            search_area: 4.0,
            size_failure: None,
            lost_wander: 2.0,
            supports_state_override: true,
            supports_search_scale: true,
        }
    }

    /// Noise-free, drift-free, instantly re-detecting, calibrated.
    pub fn perfect() -> Self {
        Self {
            name: "perfect".into(),
            center_noise: 0.0,
            scale_jitter: 0.0,
            drift_onset_prob: 0.0,
            drift_rate: 0.0,
            redetect_latency: 0,
            calibration: Calibration::WellCalibrated,
            confidence_noise: 0.0,
            distractor_susceptibility: 0.0,
            override_adoption: 0.0,
            search_area: 4.0,
            size_failure: None,
            lost_wander: 0.0,
            supports_state_override: true,
            supports_search_scale: true,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        let mut ok = prob(self.drift_onset_prob)
            && prob(self.distractor_susceptibility)
            && prob(self.override_adoption)
            && self.center_noise >= 0.0
            && self.scale_jitter >= 0.0
            && self.drift_rate >= 0.0
            && self.confidence_noise >= 0.0
            && self.lost_wander >= 0.0
            && self.search_area > 0.0;
        if let Some(sf) = &self.size_failure {
            ok &= prob(sf.onset_prob)
                && prob(sf.distort_prob)
                && sf.mean_duration >= 1.0
                && sf.distortion.0 >= 1.0
                && sf.distortion.1 >= sf.distortion.0;
        }
        match self.calibration {
            Calibration::Overconfident { bias } | Calibration::Underconfident { bias } => {
                ok &= (0.0..=1.0).contains(&bias)
            }
            Calibration::WellCalibrated => {}
        }
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidProfile(self.name.clone()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossReason {
    Disappeared,
    LeftSearchRegion,
    DistractorExpired,
    OverrideMissed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelockCause {
    Redetection,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimEventKind {
    DriftOnset,
    SizeFailureOnset,
    DistractorCapture { distractor: usize, after_override: bool },
    TargetLost(LossReason),
    Relock(RelockCause),
}

impl SimEventKind {
    pub fn label(&self) -> &'static str {
        match self {
            SimEventKind::DriftOnset => "drift_onset",
            SimEventKind::SizeFailureOnset => "size_failure_onset",
            SimEventKind::DistractorCapture { .. } => "distractor_capture",
            SimEventKind::TargetLost(LossReason::Disappeared) => "lost_disappeared",
            SimEventKind::TargetLost(LossReason::LeftSearchRegion) => "lost_left_region",
            SimEventKind::TargetLost(LossReason::DistractorExpired) => "lost_distractor_expired",
            SimEventKind::TargetLost(LossReason::OverrideMissed) => "lost_override_missed",
            SimEventKind::Relock(RelockCause::Redetection) => "relock_redetection",
            SimEventKind::Relock(RelockCause::Override) => "relock_override",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimEvent {
    pub frame: usize,
    pub kind: SimEventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LockState {
    Target,
    Distractor(usize),
    Lost { visible_frames: usize },
}

#[derive(Debug, Clone, Copy)]
struct Drift {
    direction: (f64, f64),
    offset: (f64, f64),
}

/// Event log handle that stays readable after the tracker has been moved
/// into a pipeline.
pub type EventLog = Arc<Mutex<Vec<SimEvent>>>;

pub struct ScriptedTracker {
    profile: ScriptedTrackerProfile,
    world: Arc<World>,
    seed: u64,
    stream: String,
    rng: SimRng,
    cursor: FrameCursor,
    reference: Option<BBox>,
    lock: LockState,
    drift: Option<Drift>,
    size_failure_left: usize,
    scale_factor: f64,
    override_pending: bool,
    last_search_region: Option<BBox>,
    events: EventLog,
}

impl ScriptedTracker {
    /// `stream` names the tracker's random stream; two trackers on the same
    /// seed must use different names.
    pub fn new(
        profile: ScriptedTrackerProfile,
        world: Arc<World>,
        seed: u64,
        stream: &str,
    ) -> Result<Self, SimError> {
        profile.validate()?;
        Ok(Self {
            rng: SimRng::new(seed, stream),
            profile,
            world,
            seed,
            stream: stream.to_string(),
            cursor: FrameCursor::default(),
            reference: None,
            lock: LockState::Target,
            drift: None,
            size_failure_left: 0,
            scale_factor: 1.0,
            override_pending: false,
            last_search_region: None,
            events: EventLog::default(),
        })
    }

    pub fn profile(&self) -> &ScriptedTrackerProfile {
        &self.profile
    }

    pub fn events(&self) -> Vec<SimEvent> {
        self.events.lock().expect("event log poisoned").clone()
    }

    pub fn event_log(&self) -> EventLog {
        Arc::clone(&self.events)
    }

    pub fn lock_state(&self) -> LockState {
        self.lock
    }

    pub fn scale_factor(&self) -> f64 {
        self.scale_factor
    }

    /// Region that the next step will search, centered on the reference box.
    pub fn search_region(&self) -> Option<BBox> {
        let r = self.reference?;
        let k = self.profile.search_area * self.scale_factor;
        let (cx, cy) = r.center();
        BBox::from_center(cx, cy, r.w() * k, r.h() * k).ok()
    }

    /// Region searched on the most recent step.
    pub fn last_search_region(&self) -> Option<BBox> {
        self.last_search_region
    }

    fn log(&mut self, frame: usize, kind: SimEventKind) {
        self.events
            .lock()
            .expect("event log poisoned")
            .push(SimEvent { frame, kind });
    }

    fn relock(&mut self, frame: usize, cause: RelockCause) {
        if self.lock != LockState::Target {
            self.log(frame, SimEventKind::Relock(cause));
        }
        self.lock = LockState::Target;
        self.drift = None;
        self.size_failure_left = 0;
    }

    fn lose(&mut self, frame: usize, reason: LossReason) {
        if !matches!(self.lock, LockState::Lost { .. }) {
            self.log(frame, SimEventKind::TargetLost(reason));
            self.lock = LockState::Lost { visible_frames: 0 };
        }
        self.drift = None;
        self.size_failure_left = 0;
    }

    fn capture(&mut self, frame: usize, distractor: usize, after_override: bool) {
        self.log(
            frame,
            SimEventKind::DistractorCapture {
                distractor,
                after_override,
            },
        );
        self.lock = LockState::Distractor(distractor);
        self.drift = None;
        self.size_failure_left = 0;
    }

    /// Distractor inside `region` nearest to its center, with its distance.
    fn nearest_distractor(wf: &WorldFrame, region: &BBox) -> Option<(usize, f64)> {
        let (rx, ry) = region.center();
        wf.distractors
            .iter()
            .filter_map(|d| {
                let (dx, dy) = d.bbox.center();
                region
                    .contains_point(dx, dy)
                    .then(|| (d.id, (dx - rx).hypot(dy - ry)))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }

    fn update_lock(&mut self, t: usize, wf: &WorldFrame, region: &BBox) {
        let target_in_region = wf.target.filter(|g| {
            let (gx, gy) = g.center();
            region.contains_point(gx, gy)
        });

        if std::mem::take(&mut self.override_pending) {
            // re-acquire around the corrected location
            let (rx, ry) = region.center();
            let target_dist = target_in_region.map(|g| {
                let (gx, gy) = g.center();
                (gx - rx).hypot(gy - ry)
            });
            let closer_distractor = Self::nearest_distractor(wf, region)
                .filter(|&(_, d)| target_dist.is_none_or(|td| d < td));
            if let Some((id, _)) = closer_distractor {
                // told that the target sits here, the tracker takes the
                // nearest object for it
                if self.rng.chance(self.profile.override_adoption) {
                    if self.lock != LockState::Distractor(id) {
                        self.capture(t, id, true);
                    }
                    return;
                }
            }
            if target_in_region.is_some() {
                self.relock(t, RelockCause::Override);
            } else {
                self.lose(t, LossReason::OverrideMissed);
            }
            return;
        }

        match self.lock {
            LockState::Target => match wf.target {
                None => self.lose(t, LossReason::Disappeared),
                Some(_) if target_in_region.is_none() => self.lose(t, LossReason::LeftSearchRegion),
                Some(_) => {
                    if let Some((id, _)) = Self::nearest_distractor(wf, region) {
                        if self.rng.chance(self.profile.distractor_susceptibility) {
                            self.capture(t, id, false);
                        }
                    }
                }
            },
            LockState::Distractor(id) => {
                if wf.distractor(id).is_none() {
                    self.lose(t, LossReason::DistractorExpired);
                }
            }
            LockState::Lost { .. } => {}
        }

        if let LockState::Lost { visible_frames } = self.lock {
            if wf.target.is_some() {
                if visible_frames >= self.profile.redetect_latency {
                    self.relock(t, RelockCause::Redetection);
                } else {
                    self.lock = LockState::Lost {
                        visible_frames: visible_frames + 1,
                    };
                }
            } else {
                self.lock = LockState::Lost { visible_frames: 0 };
            }
        }
    }

    fn jitter(&mut self, b: &BBox) -> Result<BBox, TrackerError> {
        let (cx, cy) = b.center();
        let p = &self.profile;
        let (sn, sj) = (p.center_noise, p.scale_jitter);
        let nx = self.rng.normal(sn);
        let ny = self.rng.normal(sn);
        let sw = self.rng.normal(sj).exp();
        let sh = self.rng.normal(sj).exp();
        Ok(BBox::from_center(cx + nx, cy + ny, b.w() * sw, b.h() * sh)?)
    }

    /// Box and the overlap the tracker believes it achieves.
    fn estimate(&mut self, t: usize, wf: &WorldFrame) -> Result<(BBox, f64), TrackerError> {
        match self.lock {
            LockState::Target => {
                let g = wf.target.expect("locked on an absent target");
                if self.drift.is_none() && self.rng.chance(self.profile.drift_onset_prob) {
                    let a = self.rng.angle();
                    self.drift = Some(Drift {
                        direction: (a.cos(), a.sin()),
                        offset: (0.0, 0.0),
                    });
                    self.log(t, SimEventKind::DriftOnset);
                }
                if let Some(sf) = self.profile.size_failure {
                    if self.size_failure_left == 0 && self.rng.chance(sf.onset_prob) {
                        let u = self.rng.uniform(f64::EPSILON, 1.0);
                        // geometric duration with the configured mean
                        let p = 1.0 / sf.mean_duration;
                        self.size_failure_left = 1 + (u.ln() / (1.0 - p).ln()).floor() as usize;
                        self.log(t, SimEventKind::SizeFailureOnset);
                    }
                }
                let clean = self.jitter(&g)?;
                let apparent = iou(&clean, &g);
                let mut out = clean;
                if let Some(d) = self.drift.as_mut() {
                    d.offset.0 += self.profile.drift_rate * d.direction.0;
                    d.offset.1 += self.profile.drift_rate * d.direction.1;
                    out = out.translated(d.offset.0, d.offset.1)?;
                }
                if self.size_failure_left > 0 {
                    self.size_failure_left -= 1;
                    let sf = self.profile.size_failure.expect("episode without profile");
                    if self.rng.chance(sf.distort_prob) {
                        let k = self.rng.uniform(sf.distortion.0, sf.distortion.1);
                        let (cx, cy) = out.center();
                        out = if self.rng.chance(0.5) {
                            BBox::from_center(cx, cy, out.w() * k, out.h())?
                        } else {
                            BBox::from_center(cx, cy, out.w(), out.h() * k)?
                        };
                    }
                }
                Ok((out, apparent))
            }
            LockState::Distractor(id) => {
                let d = wf.distractor(id).expect("locked on an expired distractor").bbox;
                let clean = self.jitter(&d)?;
                Ok((clean, iou(&clean, &d)))
            }
            LockState::Lost { .. } => {
                let r = self.reference.expect("lost before initialization");
                let (fw, fh) = self.world.frame_size();
                let (cx, cy) = r.center();
                let nx = (cx + self.rng.normal(self.profile.lost_wander)).clamp(0.0, fw);
                let ny = (cy + self.rng.normal(self.profile.lost_wander)).clamp(0.0, fh);
                Ok((BBox::from_center(nx, ny, r.w(), r.h())?, 0.0))
            }
        }
    }
}

impl Tracker for ScriptedTracker {
    fn name(&self) -> &str {
        &self.profile.name
    }

    fn capabilities(&self) -> TrackerCapabilities {
        TrackerCapabilities {
            supports_state_override: self.profile.supports_state_override,
            supports_search_scale: self.profile.supports_search_scale,
        }
    }

    fn init(&mut self, frame: &FrameHandle, bbox: BBox) -> Result<(), TrackerError> {
        self.cursor.init(frame)?;
        self.reference = Some(bbox);
        self.lock = LockState::Target;
        Ok(())
    }

    fn step(&mut self, frame: &FrameHandle) -> Result<TrackerOutput, TrackerError> {
        self.cursor.advance(frame)?;
        let world = Arc::clone(&self.world);
        let t = frame.payload as usize;
        let wf = world.frame(t).ok_or(TrackerError::MissingRecord(t))?;
        let region = self.search_region().ok_or(TrackerError::NotInitialized)?;
        self.last_search_region = Some(region);

        self.update_lock(t, wf, &region);
        let (bbox, apparent) = self.estimate(t, wf)?;
        let true_iou = wf.target.map_or(0.0, |g| iou(&bbox, &g));
        let base = match self.profile.calibration {
            Calibration::WellCalibrated => true_iou,
            Calibration::Overconfident { bias } => apparent + bias,
            Calibration::Underconfident { bias } => true_iou - bias,
        };
        let confidence = (base + self.rng.normal(self.profile.confidence_noise)).clamp(0.0, 1.0);
        self.reference = Some(bbox);
        TrackerOutput::new(bbox, confidence)
    }

    fn override_state(&mut self, bbox: BBox) -> Result<HookOutcome, TrackerError> {
        if !self.profile.supports_state_override {
            return Ok(HookOutcome::Unsupported);
        }
        if self.reference.is_none() {
            return Err(TrackerError::NotInitialized);
        }
        self.reference = Some(bbox);
        self.override_pending = true;
        Ok(HookOutcome::Applied)
    }

    fn set_search_scale(&mut self, factor: f64) -> Result<HookOutcome, TrackerError> {
        check_scale(factor)?;
        if !self.profile.supports_search_scale {
            return Ok(HookOutcome::Unsupported);
        }
        self.scale_factor = factor;
        Ok(HookOutcome::Applied)
    }

    fn reset(&mut self) {
        self.rng = SimRng::new(self.seed, &self.stream);
        self.cursor.reset();
        self.reference = None;
        self.lock = LockState::Target;
        self.drift = None;
        self.size_failure_left = 0;
        self.scale_factor = 1.0;
        self.override_pending = false;
        self.last_search_region = None;
        self.events.lock().expect("event log poisoned").clear();
    }
}
