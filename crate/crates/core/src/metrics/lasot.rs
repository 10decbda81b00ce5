use crate::sequence::SequenceGroundTruth;

use super::tlp::fraction_curve;
use super::{linspace, mean, mean_curve, samples, MetricCurves, MetricsError, PredictionTrace, PROTOCOL};

#[derive(Debug, Clone, PartialEq)]
pub struct LasotScores {
    pub success: f64,
    pub precision: f64,
    pub curves: Vec<MetricCurves>,
}

/// Scored on visible frames only, per sequence, then averaged over the
/// sequences that have at least one visible scored frame. Confidence is
/// ignored.
pub fn lasot_scores(pairs: &[(&PredictionTrace, &SequenceGroundTruth)]) -> Result<LasotScores, MetricsError> {
    let iou_grid = linspace(0.0, 1.0, PROTOCOL.curve_points);
    let dist_grid = linspace(0.0, PROTOCOL.tlp_precision_range, PROTOCOL.curve_points);
    let mut success = Vec::new();
    let mut precision = Vec::new();
    let mut success_curves = Vec::new();
    let mut precision_curves = Vec::new();
    for (trace, gt) in pairs {
        let visible: Vec<(f64, f64)> = samples(trace, gt)?
            .into_iter()
            .filter_map(|s| s.distance.map(|d| (s.iou, d)))
            .collect();
        if visible.is_empty() {
            continue;
        }
        let n = visible.len();
        success.push(mean(visible.iter().map(|v| v.0)).unwrap_or(0.0));
        let hits = visible
            .iter()
            .filter(|v| v.1 <= PROTOCOL.lasot_precision_threshold)
            .count();
        precision.push(hits as f64 / n as f64);
        success_curves.push(fraction_curve(&iou_grid, |th| visible.iter().filter(|v| v.0 > th).count(), n));
        precision_curves.push(fraction_curve(&dist_grid, |th| visible.iter().filter(|v| v.1 <= th).count(), n));
    }
    let (Some(success), Some(precision)) = (mean(success), mean(precision)) else {
        return Err(MetricsError::Empty);
    };
    Ok(LasotScores {
        success,
        precision,
        curves: vec![
            MetricCurves {
                metric: "lasot_success".into(),
                thresholds: iou_grid,
                values: mean_curve(&success_curves),
                summary: success,
            },
            MetricCurves {
                metric: "lasot_precision".into(),
                thresholds: dist_grid,
                values: mean_curve(&precision_curves),
                summary: precision,
            },
        ],
    })
}
