//! End-to-end experiments: persistence, replay and suite-level properties.

use cocolot_core::experiment::{
    export_suite, rescore, run_experiment, write_report, ExperimentConfig, RunReport, AGGREGATE,
};
use cocolot_core::formats::{export_groundtruth, parse_groundtruth};
use cocolot_core::metrics::{ltb_scores_fast, ltb_scores_pooled};
use cocolot_core::sim::{generate_sequence, suite};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap()
}

fn run(text: &str) -> RunReport {
    run_experiment(&config(text)).unwrap()
}

fn transitions(bits: impl Iterator<Item = bool>) -> usize {
    let bits: Vec<bool> = bits.collect();
    bits.windows(2).filter(|w| w[0] != w[1]).count()
}

#[test]
fn fused_presence_is_steadier_than_raw_confidence() {
    let r = run("variant = cocolot-full\nlimit = 10\n");
    let (mut fused, mut raw) = (0, [0, 0]);
    for s in &r.runs {
        fused += transitions(s.presence.iter().copied());
        for (i, n) in raw.iter_mut().enumerate() {
            *n += transitions(s.raw_confidences.iter().map(|c| c[i].unwrap() >= 0.5));
        }
    }
    assert!(fused < raw[0] && fused < raw[1], "fused {fused}, raw {raw:?}");
}

#[test]
fn grid_ltb_agrees_with_the_exact_sweep() {
    let r = run("variant = cocolot-full\nlimit = 10\n");
    let pairs: Vec<_> = r.runs.iter().map(|s| (&s.trace, &s.groundtruth)).collect();
    let exact = ltb_scores_pooled(&pairs).unwrap().f_score;
    let fast = ltb_scores_fast(&pairs).unwrap().f_score;
    assert!((exact - fast).abs() <= 0.005, "exact {exact}, grid {fast}");
}

#[test]
fn groundtruth_export_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    for spec in suite("complementary").unwrap().specs.iter().take(5) {
        let gt = generate_sequence(spec).unwrap();
        let path = dir.path().join(format!("{}.txt", spec.name));
        export_groundtruth(&path, &gt).unwrap();
        let back = parse_groundtruth(&path).unwrap();
        assert_eq!(back.len(), gt.len());
        for (a, b) in gt.frames.iter().zip(&back.frames) {
            let bits = |b: &Option<_>| b.map(|b: cocolot_core::BBox| b.to_array().map(f64::to_bits));
            assert_eq!(bits(a), bits(b));
        }
    }
}

#[test]
fn rescoring_a_report_reproduces_its_metrics() {
    let r = run("variant = baseline-5\nsuite = overconfidence\nlimit = 3\n");
    let dir = tempfile::tempdir().unwrap();
    write_report(&r, dir.path()).unwrap();
    let (rows, curves) = rescore(dir.path()).unwrap();
    assert_eq!(rows, r.metrics);
    assert_eq!(curves, r.curves);
}

#[test]
fn exported_suite_replays_like_the_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let s = suite("complementary").unwrap();
    assert_eq!(export_suite(&s, 0, Some(3), dir.path()).unwrap(), 3);
    for variant in ["ablation-1", "ablation-2", "ablation-3", "ablation-6", "baseline-3", "baseline-5"] {
        let direct = run(&format!("variant = {variant}\nlimit = 3\n"));
        let replay = run(&format!("variant = {variant}\ndataset = {}\n", dir.path().display()));
        assert_eq!(direct.metrics, replay.metrics, "{variant}");
    }
}

#[test]
fn search_scale_heuristic_reduces_captures_in_the_pipeline() {
    let captures = |variant: &str| {
        let r = run(&format!("variant = {variant}\nlimit = 20\n"));
        r.event_counts.get("tracker1.distractor_capture").copied().unwrap_or(0)
    };
    let (without, with) = (captures("ablation-7"), captures("ablation-8"));
    assert!(with < without, "with heuristic {with}, without {without}");
}

#[test]
fn report_has_one_aggregate_row_per_metric() {
    let r = run("variant = cocolot-full\nlimit = 2\n");
    for name in cocolot_core::experiment::METRIC_NAMES {
        let n = r.metrics.iter().filter(|m| m.sequence == AGGREGATE && m.metric == name).count();
        assert_eq!(n, 1, "{name}");
    }
}
