//! Long-term tracking evaluation: LTB precision/recall/F-score, TLP and
//! LaSOT success/precision, and presence classification.
//!
//! Frame 0 is the initialization frame and never scored.

mod lasot;
mod ltb;
mod presence;
mod tlp;

use thiserror::Error;

use crate::geometry::{center_distance, iou, BBox};
use crate::sequence::SequenceGroundTruth;
use crate::tracker_api::TrackerOutput;

pub use lasot::{lasot_scores, LasotScores};
pub use ltb::{ltb_scores, ltb_scores_fast, ltb_scores_pooled, LtbScores};
pub use presence::{presence_metrics, presence_metrics_pooled, PresenceMetrics};
pub use tlp::{tlp_scores, TlpScores};

/// Reading of the evaluation protocols; every constant that a different
/// interpretation would change lives here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    /// Confidence at or above which a frame counts as "predicted present"
    /// for TLP absence credit and presence metrics.
    pub presence_threshold: f64,
    /// Upper end of the TLP precision plot, pixels.
    pub tlp_precision_range: f64,
    /// LaSOT precision is read at this center distance, pixels.
    pub lasot_precision_threshold: f64,
    /// Points of the uniform threshold grid used by the fast LTB mode.
    pub fast_grid_points: usize,
    /// Leading frames excluded from scoring.
    pub skipped_frames: usize,
    /// Sampling density of emitted success/precision curves.
    pub curve_points: usize,
}

pub const PROTOCOL: Protocol = Protocol {
    presence_threshold: 0.5,
    tlp_precision_range: 50.0,
    lasot_precision_threshold: 20.0,
    fast_grid_points: 100,
    skipped_frames: 1,
    curve_points: 101,
};

/// Window sizes of the temporal-window sweep.
pub const TSTAR_GRID: [usize; 5] = [1, 2, 5, 10, 20];

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("sequence '{name}': trace has {trace} frames, ground truth has {gt}")]
    LengthMismatch { name: String, trace: usize, gt: usize },
    #[error("nothing to score")]
    Empty,
    #[error("sequence '{name}': confidence {value} at frame {frame} outside [0, 1]")]
    InvalidConfidence { name: String, frame: usize, value: f64 },
}

/// A tracker's output on every frame of a sequence, frame 0 included.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTrace {
    pub name: String,
    pub frames: Vec<TrackerOutput>,
}

impl PredictionTrace {
    pub fn new(name: impl Into<String>, frames: Vec<TrackerOutput>) -> Self {
        Self {
            name: name.into(),
            frames,
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Sampled curve with its scalar summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricCurves {
    pub metric: String,
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
    pub summary: f64,
}

/// One scored frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FrameSample {
    pub confidence: f64,
    /// 0 when the target is absent.
    pub iou: f64,
    /// `None` when the target is absent.
    pub distance: Option<f64>,
}

impl FrameSample {
    pub fn visible(&self) -> bool {
        self.distance.is_some()
    }

    pub fn predicted_present(&self) -> bool {
        self.confidence >= PROTOCOL.presence_threshold
    }
}

pub(crate) fn samples(
    trace: &PredictionTrace,
    gt: &SequenceGroundTruth,
) -> Result<Vec<FrameSample>, MetricsError> {
    if trace.len() != gt.len() {
        return Err(MetricsError::LengthMismatch {
            name: gt.name.clone(),
            trace: trace.len(),
            gt: gt.len(),
        });
    }
    if gt.is_empty() {
        return Err(MetricsError::Empty);
    }
    trace
        .frames
        .iter()
        .zip(&gt.frames)
        .enumerate()
        .skip(PROTOCOL.skipped_frames)
        .map(|(t, (p, g))| {
            if !(0.0..=1.0).contains(&p.confidence) {
                return Err(MetricsError::InvalidConfidence {
                    name: gt.name.clone(),
                    frame: t,
                    value: p.confidence,
                });
            }
            Ok(sample(p, g.as_ref()))
        })
        .collect()
}

fn sample(p: &TrackerOutput, g: Option<&BBox>) -> FrameSample {
    FrameSample {
        confidence: p.confidence,
        iou: g.map_or(0.0, |g| iou(&p.bbox, g)),
        distance: g.map(|g| center_distance(&p.bbox, g)),
    }
}

/// Evenly spaced thresholds over `[lo, hi]`.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub(crate) fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (s, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Pointwise mean of equally sampled curves.
pub(crate) fn mean_curve(curves: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = curves.first() else {
        return vec![];
    };
    (0..first.len())
        .map(|i| curves.iter().map(|c| c[i]).sum::<f64>() / curves.len() as f64)
        .collect()
}

/// F-score, Pr and Re of a temporal-window setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TStarRow {
    pub window: usize,
    pub f_score: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Scores one set of runs per window size.
pub fn tstar_sweep(
    runs: &[(usize, Vec<(&PredictionTrace, &SequenceGroundTruth)>)],
) -> Result<Vec<TStarRow>, MetricsError> {
    runs.iter()
        .map(|(window, pairs)| {
            let s = ltb_scores_pooled(pairs)?;
            Ok(TStarRow {
                window: *window,
                f_score: s.f_score,
                precision: s.precision,
                recall: s.recall,
            })
        })
        .collect()
}
