use crate::sequence::SequenceGroundTruth;

use super::{samples, MetricsError, PredictionTrace};

/// Presence classification of the thresholded confidence, pooled over
/// frames. A rate is `None` when its class never occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresenceMetrics {
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

pub fn presence_metrics(trace: &PredictionTrace, gt: &SequenceGroundTruth) -> Result<PresenceMetrics, MetricsError> {
    presence_metrics_pooled(&[(trace, gt)])
}

pub fn presence_metrics_pooled(
    pairs: &[(&PredictionTrace, &SequenceGroundTruth)],
) -> Result<PresenceMetrics, MetricsError> {
    let (mut tp, mut fn_, mut tn, mut fp) = (0usize, 0usize, 0usize, 0usize);
    for (trace, gt) in pairs {
        for s in samples(trace, gt)? {
            match (s.visible(), s.predicted_present()) {
                (true, true) => tp += 1,
                (true, false) => fn_ += 1,
                (false, false) => tn += 1,
                (false, true) => fp += 1,
            }
        }
    }
    let rate = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    Ok(PresenceMetrics {
        accuracy: rate(tp + tn, tp + tn + fp + fn_),
        sensitivity: rate(tp, tp + fn_),
        specificity: rate(tn, tn + fp),
    })
}
