use crate::formats::MetricRow;
use crate::metrics::{
    lasot_scores, ltb_scores, ltb_scores_pooled, presence_metrics, presence_metrics_pooled, tlp_scores,
    MetricCurves, MetricsError, PredictionTrace, PresenceMetrics,
};
use crate::sequence::SequenceGroundTruth;

/// Sequence name of the rows that summarize a whole experiment.
pub const AGGREGATE: &str = "ALL";

pub const METRIC_NAMES: [&str; 11] = [
    "ltb_f",
    "ltb_precision",
    "ltb_recall",
    "ltb_threshold",
    "tlp_success",
    "tlp_precision",
    "lasot_success",
    "lasot_precision",
    "presence_accuracy",
    "presence_sensitivity",
    "presence_specificity",
];

type Pair<'a> = (&'a PredictionTrace, &'a SequenceGroundTruth);

/// Per-sequence rows in sequence-name order, then the aggregate rows, plus
/// the aggregate curves.
pub fn score_sequences(pairs: &[Pair<'_>]) -> Result<(Vec<MetricRow>, Vec<MetricCurves>), MetricsError> {
    let mut pairs = pairs.to_vec();
    pairs.sort_by(|a, b| a.1.name.cmp(&b.1.name));

    let mut rows = Vec::new();
    for &(trace, gt) in &pairs {
        let single = [(trace, gt)];
        let ltb = allow_empty(ltb_scores(trace, gt))?;
        let tlp = allow_empty(tlp_scores(&single))?;
        let lasot = allow_empty(lasot_scores(&single))?;
        let presence = allow_empty(presence_metrics(trace, gt))?;
        rows.extend(rows_for(
            &gt.name,
            ltb.map(|s| [s.f_score, s.precision, s.recall, s.threshold]),
            tlp.map(|s| [s.success, s.precision]),
            lasot.map(|s| [s.success, s.precision]),
            presence,
        ));
    }

    let ltb = ltb_scores_pooled(&pairs)?;
    let tlp = allow_empty(tlp_scores(&pairs))?;
    let lasot = allow_empty(lasot_scores(&pairs))?;
    let presence = presence_metrics_pooled(&pairs)?;
    rows.extend(rows_for(
        AGGREGATE,
        Some([ltb.f_score, ltb.precision, ltb.recall, ltb.threshold]),
        tlp.as_ref().map(|s| [s.success, s.precision]),
        lasot.as_ref().map(|s| [s.success, s.precision]),
        Some(presence),
    ));

    let mut curves = ltb.curves;
    curves.extend(tlp.map(|s| s.curves).unwrap_or_default());
    curves.extend(lasot.map(|s| s.curves).unwrap_or_default());
    Ok((rows, curves))
}

fn allow_empty<T>(r: Result<T, MetricsError>) -> Result<Option<T>, MetricsError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(MetricsError::Empty) => Ok(None),
        Err(e) => Err(e),
    }
}

fn rows_for(
    sequence: &str,
    ltb: Option<[f64; 4]>,
    tlp: Option<[f64; 2]>,
    lasot: Option<[f64; 2]>,
    presence: Option<PresenceMetrics>,
) -> Vec<MetricRow> {
    let mut values: Vec<Option<f64>> = Vec::with_capacity(METRIC_NAMES.len());
    values.extend(ltb.map_or([None; 4], |v| v.map(Some)));
    values.extend(tlp.map_or([None; 2], |v| v.map(Some)));
    values.extend(lasot.map_or([None; 2], |v| v.map(Some)));
    let p = presence.map_or([None; 3], |p| [p.accuracy, p.sensitivity, p.specificity]);
    values.extend(p);
    METRIC_NAMES
        .iter()
        .zip(values)
        .map(|(m, value)| MetricRow {
            sequence: sequence.to_string(),
            metric: m.to_string(),
            value,
        })
        .collect()
}
