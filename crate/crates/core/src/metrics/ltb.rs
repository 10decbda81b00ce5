use crate::sequence::SequenceGroundTruth;

use super::{linspace, samples, FrameSample, MetricCurves, MetricsError, PredictionTrace, PROTOCOL};

#[derive(Debug, Clone, PartialEq)]
pub struct LtbScores {
    pub f_score: f64,
    /// Precision and recall at the F-maximizing threshold.
    pub precision: f64,
    pub recall: f64,
    /// Lowest threshold attaining the maximum F.
    pub threshold: f64,
    /// `ltb_precision`, `ltb_recall` and `ltb_f` over ascending thresholds.
    pub curves: Vec<MetricCurves>,
}

pub fn ltb_scores(trace: &PredictionTrace, gt: &SequenceGroundTruth) -> Result<LtbScores, MetricsError> {
    ltb_scores_pooled(&[(trace, gt)])
}

/// Frames of all sequences are pooled before sweeping the threshold. Every
/// distinct confidence value is a candidate threshold.
pub fn ltb_scores_pooled(
    pairs: &[(&PredictionTrace, &SequenceGroundTruth)],
) -> Result<LtbScores, MetricsError> {
    let mut all = pooled(pairs)?;
    let n_gt = all.iter().filter(|s| s.visible()).count();
    // canonical order, so the float sums do not depend on sequence order
    all.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then(a.iou.total_cmp(&b.iou))
    });

    let mut points = Vec::new();
    let (mut sum, mut n_pred) = (0.0, 0usize);
    for (i, s) in all.iter().enumerate() {
        sum += s.iou;
        n_pred += 1;
        let group_ends = all.get(i + 1).is_none_or(|n| n.confidence != s.confidence);
        if group_ends {
            points.push((s.confidence, sum, n_pred));
        }
    }
    points.reverse();
    Ok(summarize(&points, n_gt))
}

/// Same quantities on a uniform threshold grid instead of the exact
/// distinct-value sweep.
pub fn ltb_scores_fast(
    pairs: &[(&PredictionTrace, &SequenceGroundTruth)],
) -> Result<LtbScores, MetricsError> {
    let mut all = pooled(pairs)?;
    let n_gt = all.iter().filter(|s| s.visible()).count();
    all.sort_by(|a, b| {
        a.confidence
            .total_cmp(&b.confidence)
            .then(a.iou.total_cmp(&b.iou))
    });
    // suffix sums over ascending confidence
    let mut suffix = vec![0.0; all.len() + 1];
    for i in (0..all.len()).rev() {
        suffix[i] = suffix[i + 1] + all[i].iou;
    }
    let points: Vec<(f64, f64, usize)> = linspace(0.0, 1.0, PROTOCOL.fast_grid_points)
        .into_iter()
        .map(|tau| {
            let first = all.partition_point(|s| s.confidence < tau);
            (tau, suffix[first], all.len() - first)
        })
        .collect();
    Ok(summarize(&points, n_gt))
}

fn pooled(pairs: &[(&PredictionTrace, &SequenceGroundTruth)]) -> Result<Vec<FrameSample>, MetricsError> {
    let mut all = Vec::new();
    for (trace, gt) in pairs {
        all.extend(samples(trace, gt)?);
    }
    if all.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(all)
}

fn pr_re(sum: f64, n_pred: usize, n_gt: usize) -> (f64, f64, f64) {
    let pr = if n_pred == 0 { 0.0 } else { sum / n_pred as f64 };
    let re = if n_gt == 0 { 0.0 } else { sum / n_gt as f64 };
    let f = if pr + re > 0.0 { 2.0 * pr * re / (pr + re) } else { 0.0 };
    (pr, re, f)
}

/// `points` are (threshold, IoU sum, predicted-present count) in ascending
/// threshold order.
fn summarize(points: &[(f64, f64, usize)], n_gt: usize) -> LtbScores {
    let mut thresholds = Vec::with_capacity(points.len());
    let mut pr_curve = Vec::with_capacity(points.len());
    let mut re_curve = Vec::with_capacity(points.len());
    let mut f_curve = Vec::with_capacity(points.len());
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for &(tau, sum, n_pred) in points {
        let (pr, re, f) = pr_re(sum, n_pred, n_gt);
        thresholds.push(tau);
        pr_curve.push(pr);
        re_curve.push(re);
        f_curve.push(f);
        if best.is_none_or(|b| f > b.0) {
            best = Some((f, pr, re, tau));
        }
    }
    let (f_score, precision, recall, threshold) = best.unwrap_or((0.0, 0.0, 0.0, 0.0));
    let curve = |metric: &str, values: Vec<f64>, summary: f64| MetricCurves {
        metric: metric.into(),
        thresholds: thresholds.clone(),
        values,
        summary,
    };
    LtbScores {
        f_score,
        precision,
        recall,
        threshold,
        curves: vec![
            curve("ltb_precision", pr_curve, precision),
            curve("ltb_recall", re_curve, recall),
            curve("ltb_f", f_curve, f_score),
        ],
    }
}
