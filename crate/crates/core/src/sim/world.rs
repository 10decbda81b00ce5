//! Ground-truth trajectories with disappearances and distractors.

use crate::geometry::BBox;
use crate::sequence::SequenceGroundTruth;

use super::rng::SimRng;
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionModel {
    /// Constant velocity, reflecting off the frame borders.
    Linear { speed: f64 },
    /// Constant speed with a heading that random-walks by `turn` radians
    /// (standard deviation) per frame.
    RandomWalk { speed: f64, turn: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub start: usize,
    pub duration: usize,
}

impl Interval {
    pub fn new(start: usize, duration: usize) -> Self {
        Self { start, duration }
    }

    pub fn end(&self) -> usize {
        self.start + self.duration
    }

    pub fn contains(&self, t: usize) -> bool {
        t >= self.start && t < self.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DistractorSpec {
    pub count: usize,
    /// Center distance from the target at spawn time, in pixels.
    pub spawn_distance: f64,
    pub lifetime: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub name: String,
    pub length: usize,
    pub frame_size: (f64, f64),
    pub motion: MotionModel,
    pub base_size: (f64, f64),
    /// Maximum per-frame change of the log scale.
    pub scale_drift_rate: f64,
    pub disappearances: Vec<Interval>,
    pub distractors: DistractorSpec,
    pub seed: u64,
}

/// Scale stays within this factor range of the base size.
const SCALE_RANGE: (f64, f64) = (0.6, 1.6);
const SCALE_PERIOD: f64 = 400.0;

impl SequenceSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidSpec(format!("{}: {m}", self.name)));
        if self.length < 2 {
            return bad("sequences need at least two frames".into());
        }
        let (fw, fh) = self.frame_size;
        let (bw, bh) = self.base_size;
        if !(bw > 0.0 && bh > 0.0) {
            return bad("base size must be positive".into());
        }
        if !(fw >= bw * SCALE_RANGE.1 * 1.5 && fh >= bh * SCALE_RANGE.1 * 1.5) {
            return bad("frame too small for the target".into());
        }
        let speed = match self.motion {
            MotionModel::Linear { speed } => speed,
            MotionModel::RandomWalk { speed, turn } => {
                if !(turn >= 0.0) {
                    return bad("turn must be non-negative".into());
                }
                speed
            }
        };
        if !(speed >= 0.0 && speed.is_finite()) {
            return bad("speed must be non-negative".into());
        }
        if !(self.scale_drift_rate >= 0.0) {
            return bad("scale drift rate must be non-negative".into());
        }
        let mut prev_end = 1;
        for iv in &self.disappearances {
            if iv.duration < 1 {
                return bad("disappearance durations must be at least 1".into());
            }
            // frame 0 carries the initialization box
            if iv.start < prev_end || iv.end() > self.length {
                return bad(format!(
                    "disappearance ({}, {}) overlaps another, covers frame 0 or leaves the sequence",
                    iv.start, iv.duration
                ));
            }
            prev_end = iv.end();
        }
        if self.distractors.count > 0
            && (self.distractors.lifetime < 1 || !(self.distractors.spawn_distance >= 0.0))
        {
            return bad("distractors need a positive lifetime".into());
        }
        Ok(())
    }

    pub fn is_absent(&self, t: usize) -> bool {
        self.disappearances.iter().any(|iv| iv.contains(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distractor {
    pub id: usize,
    pub bbox: BBox,
}

/// Hidden state of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldFrame {
    /// Target box when visible.
    pub target: Option<BBox>,
    /// Where the target is, visible or not.
    pub hidden_target: BBox,
    pub distractors: Vec<Distractor>,
}

impl WorldFrame {
    pub fn distractor(&self, id: usize) -> Option<&Distractor> {
        self.distractors.iter().find(|d| d.id == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub spec: SequenceSpec,
    pub truth: SequenceGroundTruth,
    frames: Vec<WorldFrame>,
}

impl World {
    pub fn frame(&self, t: usize) -> Option<&WorldFrame> {
        self.frames.get(t)
    }

    pub fn frames(&self) -> &[WorldFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_size(&self) -> (f64, f64) {
        self.spec.frame_size
    }
}

struct DistractorTrack {
    id: usize,
    spawn: usize,
    lifetime: usize,
    angle: f64,
    angular_speed: f64,
    wobble_phase: f64,
    size_factor: (f64, f64),
}

fn clamp_center(c: f64, half: f64, extent: f64) -> f64 {
    c.clamp(half, (extent - half).max(half))
}

pub fn generate_world(spec: &SequenceSpec) -> Result<World, SimError> {
    spec.validate()?;
    let mut rng = SimRng::new(spec.seed, "world");
    let (fw, fh) = spec.frame_size;
    let (bw, bh) = spec.base_size;

    let margin_x = bw * SCALE_RANGE.1 / 2.0;
    let margin_y = bh * SCALE_RANGE.1 / 2.0;
    let mut cx = rng.uniform(margin_x, fw - margin_x);
    let mut cy = rng.uniform(margin_y, fh - margin_y);
    let (speed, turn) = match spec.motion {
        MotionModel::Linear { speed } => (speed, 0.0),
        MotionModel::RandomWalk { speed, turn } => (speed, turn),
    };
    let mut heading = rng.angle();
    let mut vx = speed * heading.cos();
    let mut vy = speed * heading.sin();
    let mut log_scale = 0.0f64;
    let scale_phase = rng.angle();

    let mut tracks: Vec<DistractorTrack> = (0..spec.distractors.count)
        .map(|id| {
            let last_start = spec.length.saturating_sub(spec.distractors.lifetime).max(1);
            DistractorTrack {
                id,
                spawn: rng.range(1, last_start),
                lifetime: spec.distractors.lifetime,
                angle: rng.angle(),
                angular_speed: rng.uniform(0.004, 0.015) * if rng.chance(0.5) { 1.0 } else { -1.0 },
                wobble_phase: rng.angle(),
                size_factor: (rng.uniform(0.9, 1.1), rng.uniform(0.9, 1.1)),
            }
        })
        .collect();
    tracks.sort_by_key(|d| (d.spawn, d.id));

    let mut frames = Vec::with_capacity(spec.length);
    let mut truth = Vec::with_capacity(spec.length);
    for t in 0..spec.length {
        if t > 0 {
            if turn > 0.0 {
                heading += rng.normal(turn);
                vx = speed * heading.cos();
                vy = speed * heading.sin();
            }
            let phase = scale_phase + std::f64::consts::TAU * t as f64 / SCALE_PERIOD;
            log_scale = (log_scale + spec.scale_drift_rate * phase.sin())
                .clamp(SCALE_RANGE.0.ln(), SCALE_RANGE.1.ln());
            cx += vx;
            cy += vy;
        }
        let s = log_scale.exp();
        let (w, h) = (bw * s, bh * s);
        if cx - w / 2.0 < 0.0 || cx + w / 2.0 > fw {
            vx = -vx;
            heading = vy.atan2(vx);
            cx = clamp_center(cx, w / 2.0, fw);
        }
        if cy - h / 2.0 < 0.0 || cy + h / 2.0 > fh {
            vy = -vy;
            heading = vy.atan2(vx);
            cy = clamp_center(cy, h / 2.0, fh);
        }
        let hidden = BBox::from_center(cx, cy, w, h)?;

        let mut distractors = Vec::new();
        for d in &tracks {
            if t < d.spawn || t >= d.spawn + d.lifetime {
                continue;
            }
            let age = (t - d.spawn) as f64;
            let a = d.angle + d.angular_speed * age;
            let r = spec.distractors.spawn_distance * (1.0 + 0.15 * (d.wobble_phase + 0.05 * age).sin());
            let (dw, dh) = (w * d.size_factor.0, h * d.size_factor.1);
            let dx = clamp_center(cx + r * a.cos(), dw / 2.0, fw);
            let dy = clamp_center(cy + r * a.sin(), dh / 2.0, fh);
            distractors.push(Distractor {
                id: d.id,
                bbox: BBox::from_center(dx, dy, dw, dh)?,
            });
        }

        let target = (!spec.is_absent(t)).then_some(hidden);
        truth.push(target);
        frames.push(WorldFrame {
            target,
            hidden_target: hidden,
            distractors,
        });
    }

    Ok(World {
        spec: spec.clone(),
        truth: SequenceGroundTruth::new(spec.name.clone(), truth),
        frames,
    })
}

/// Ground truth only, without the hidden distractor state.
pub fn generate_sequence(spec: &SequenceSpec) -> Result<SequenceGroundTruth, SimError> {
    generate_world(spec).map(|w| w.truth)
}
