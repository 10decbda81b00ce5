use crate::sequence::SequenceGroundTruth;

use super::{linspace, mean, mean_curve, samples, FrameSample, MetricCurves, MetricsError, PredictionTrace, PROTOCOL};

#[derive(Debug, Clone, PartialEq)]
pub struct TlpScores {
    pub success: f64,
    pub precision: f64,
    /// `tlp_success` over IoU thresholds and `tlp_precision` over distance
    /// thresholds, averaged over sequences.
    pub curves: Vec<MetricCurves>,
}

/// Overlap credited to a frame: IoU when the target is visible and predicted
/// present, 1 for a correctly predicted absence, 0 otherwise.
fn credited_overlap(s: &FrameSample) -> f64 {
    match (s.visible(), s.predicted_present()) {
        (true, true) => s.iou,
        (false, false) => 1.0,
        _ => 0.0,
    }
}

/// Center distance credited to a frame; infinite when presence is wrong.
fn credited_distance(s: &FrameSample) -> f64 {
    match (s.distance, s.predicted_present()) {
        (Some(d), true) => d,
        (None, false) => 0.0,
        _ => f64::INFINITY,
    }
}

/// Success and precision AUCs per sequence, averaged over sequences. The AUCs
/// are exact integrals of the step curves: the success AUC over [0, 1] is the
/// mean credited overlap, and the normalized precision AUC over
/// [0, range] is the mean of `max(0, 1 - d / range)`.
pub fn tlp_scores(pairs: &[(&PredictionTrace, &SequenceGroundTruth)]) -> Result<TlpScores, MetricsError> {
    let range = PROTOCOL.tlp_precision_range;
    let iou_grid = linspace(0.0, 1.0, PROTOCOL.curve_points);
    let dist_grid = linspace(0.0, range, PROTOCOL.curve_points);
    let mut success = Vec::new();
    let mut precision = Vec::new();
    let mut success_curves = Vec::new();
    let mut precision_curves = Vec::new();
    for (trace, gt) in pairs {
        let s = samples(trace, gt)?;
        if s.is_empty() {
            continue;
        }
        let overlaps: Vec<f64> = s.iter().map(credited_overlap).collect();
        let dists: Vec<f64> = s.iter().map(credited_distance).collect();
        success.push(mean(overlaps.iter().copied()).unwrap_or(0.0));
        precision.push(mean(dists.iter().map(|d| (1.0 - d / range).max(0.0))).unwrap_or(0.0));
        success_curves.push(fraction_curve(&iou_grid, |th| overlaps.iter().filter(|&&o| o > th).count(), s.len()));
        precision_curves.push(fraction_curve(&dist_grid, |th| dists.iter().filter(|&&d| d <= th).count(), s.len()));
    }
    let (Some(success), Some(precision)) = (mean(success), mean(precision)) else {
        return Err(MetricsError::Empty);
    };
    Ok(TlpScores {
        success,
        precision,
        curves: vec![
            MetricCurves {
                metric: "tlp_success".into(),
                thresholds: iou_grid,
                values: mean_curve(&success_curves),
                summary: success,
            },
            MetricCurves {
                metric: "tlp_precision".into(),
                thresholds: dist_grid,
                values: mean_curve(&precision_curves),
                summary: precision,
            },
        ],
    })
}

pub(crate) fn fraction_curve(grid: &[f64], count: impl Fn(f64) -> usize, n: usize) -> Vec<f64> {
    grid.iter().map(|&th| count(th) as f64 / n as f64).collect()
}
