//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion before asserting, so `cargo test --test acceptance -- --nocapture`
//! gives a readable summary.

mod common;

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cocolot_core::experiment::{
    run_experiment, run_sweep, score_sequences, write_report, ExperimentConfig, ExperimentError, RunReport, Variant,
    AGGREGATE,
};
use cocolot_core::formats::{export_groundtruth, write_log_file, LogRecord, TrackerLog};
use cocolot_core::fusion::{window_presence, CombinationMode};
use cocolot_core::metrics::{lasot_scores, ltb_scores, ltb_scores_pooled, tlp_scores, TSTAR_GRID};
use cocolot_core::{
    BBox, Controller, ControllerConfig, FrameHandle, PredictionTrace, SequenceGroundTruth, TrackerOutput,
    TrackerSlot,
};

use common::{bb, oracle_iou, ListTracker, ListVerifier};

fn report(n: u8, title: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} [{verdict}] {title}: {detail}");
}

fn out(bbox: BBox, confidence: f64) -> TrackerOutput {
    TrackerOutput::new(bbox, confidence).unwrap()
}

/// Brute-force F: every distinct confidence of a scored frame is tried as
/// the threshold, with predicted-present meaning `confidence >= threshold`.
fn brute_force_f(pairs: &[(&PredictionTrace, &SequenceGroundTruth)]) -> f64 {
    let mut frames = Vec::new();
    for (trace, gt) in pairs {
        for t in 1..gt.len() {
            let p = trace.frames[t];
            let overlap = gt.get(t).map_or(0.0, |g| oracle_iou(&p.bbox, g));
            frames.push((p.confidence, overlap, gt.is_visible(t)));
        }
    }
    let n_visible = frames.iter().filter(|f| f.2).count() as f64;
    let mut best: f64 = 0.0;
    for &(tau, _, _) in &frames {
        let kept: Vec<_> = frames.iter().filter(|f| f.0 >= tau).collect();
        let sum: f64 = kept.iter().map(|f| f.1).sum();
        let pr = sum / kept.len() as f64;
        let re = if n_visible > 0.0 { sum / n_visible } else { 0.0 };
        if pr + re > 0.0 {
            best = best.max(2.0 * pr * re / (pr + re));
        }
    }
    best
}

fn random_toy(rng: &mut ChaCha8Rng, name: &str, len: usize) -> (PredictionTrace, SequenceGroundTruth) {
    let mut truth = Vec::with_capacity(len);
    let mut frames = Vec::with_capacity(len);
    for t in 0..len {
        let g = bb(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0), 20.0, 20.0);
        let visible = t == 0 || rng.random_bool(0.7);
        truth.push(visible.then_some(g));
        let p = bb(
            g.x() + rng.random_range(-15.0..15.0),
            g.y() + rng.random_range(-15.0..15.0),
            rng.random_range(10.0..30.0),
            rng.random_range(10.0..30.0),
        );
        // a coarse grid forces ties between frames
        let conf = if rng.random_bool(0.5) {
            f64::from(rng.random_range(0..=10u8)) / 10.0
        } else {
            rng.random::<f64>()
        };
        frames.push(out(p, conf));
    }
    (PredictionTrace::new(name, frames), SequenceGroundTruth::new(name, truth))
}

#[test]
fn criterion_01_ltb_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2021);
    let toys: Vec<_> = (0..20).map(|i| random_toy(&mut rng, &format!("toy{i}"), 50)).collect();
    let mut worst: f64 = 0.0;
    for (trace, gt) in &toys {
        let got = ltb_scores(trace, gt).unwrap().f_score;
        worst = worst.max((got - brute_force_f(&[(trace, gt)])).abs());
    }
    let pairs: Vec<_> = toys.iter().map(|(t, g)| (t, g)).collect();
    let pooled = ltb_scores_pooled(&pairs).unwrap().f_score;
    worst = worst.max((pooled - brute_force_f(&pairs)).abs());
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(1);
    report(
        1,
        "LTB F equals brute force",
        pass,
        format!("20 toys plus pooled, max |diff| {worst:.2e}, {elapsed:.2?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_hand_computed_fixtures() {
    let g = bb(0.0, 0.0, 10.0, 10.0);
    let half = bb(0.0, 0.0, 10.0, 5.0); // IoU 1/2 with g
    let quarter = bb(0.0, 0.0, 10.0, 2.5); // IoU 1/4 with g

    // 10 scored frames, 5 absent, always reported present with a perfect box:
    // Pr = 5/10, Re = 5/5, F = 2 * 0.5 * 1 / 1.5
    let truth: Vec<_> = (0..11).map(|t| (t == 0 || t % 2 == 1).then_some(g)).collect();
    let gt = SequenceGroundTruth::new("ltb", truth);
    let trace = PredictionTrace::new("ltb", vec![out(g, 1.0); 11]);
    let ltb = ltb_scores(&trace, &gt).unwrap();
    let ltb_ok = (ltb.precision - 0.5).abs() < 1e-9
        && (ltb.recall - 1.0).abs() < 1e-9
        && (ltb.f_score - 2.0 / 3.0).abs() < 1e-9;

    // half the frames absent and declared absent (credited overlap 1), the
    // rest at overlap 1/2: success is 1 below 1/2 and 1/2 above, AUC 3/4
    let truth: Vec<_> = (0..11).map(|t| (t == 0 || t % 2 == 1).then_some(g)).collect();
    let gt = SequenceGroundTruth::new("tlp", truth);
    let frames: Vec<_> = (0..11)
        .map(|t| if gt.is_visible(t) { out(half, 0.9) } else { out(half, 0.1) })
        .collect();
    let trace = PredictionTrace::new("tlp", frames);
    let tlp = tlp_scores(&[(&trace, &gt)]).unwrap();
    let tlp_ok = (tlp.success - 0.75).abs() < 1e-9;

    // constant overlaps 1, 1/2 and 1/4 give per-sequence AUCs equal to the
    // overlap; the aggregate is their mean
    let seqs: Vec<_> = [("a", g), ("b", half), ("c", quarter)]
        .into_iter()
        .map(|(name, p)| {
            let truth = (0..8).map(|t| (t % 3 != 2).then_some(g)).collect();
            (
                PredictionTrace::new(name, vec![out(p, 1.0); 8]),
                SequenceGroundTruth::new(name, truth),
            )
        })
        .collect();
    let pairs: Vec<_> = seqs.iter().map(|(t, g)| (t, g)).collect();
    let lasot = lasot_scores(&pairs).unwrap();
    let lasot_ok = (lasot.success - (1.0 + 0.5 + 0.25) / 3.0).abs() < 1e-9;

    let pass = ltb_ok && tlp_ok && lasot_ok;
    report(
        2,
        "hand-computed metric fixtures",
        pass,
        format!(
            "LTB F {:.9} (2/3), TLP AUC {:.9} (3/4), LaSOT mean {:.9} (7/12)",
            ltb.f_score, tlp.success, lasot.success
        ),
    );
    assert!(pass);
}

/// Runs one controller frame with window 1, so the presence bits are the
/// single-frame decisions, and returns the selected tracker.
fn select_once(o1: TrackerOutput, o2: TrackerOutput, v1: f64, v2: f64) -> TrackerSlot {
    let cfg = ControllerConfig {
        window: 1,
        enable_aspect_penalty: false,
        combination_mode: CombinationMode::Windowed,
        ..ControllerConfig::default()
    };
    let mut c = Controller::new(
        cfg,
        Box::new(ListTracker::new(vec![o1])),
        Box::new(ListTracker::new(vec![o2])),
        Box::new(ListVerifier::new(vec![v1, v2])),
    )
    .unwrap();
    c.init(&FrameHandle::new(0), bb(0.0, 0.0, 10.0, 10.0)).unwrap();
    let fused = c.step(&FrameHandle::new(1)).unwrap();
    let expected_box = if fused.selected == TrackerSlot::First { o1.bbox } else { o2.bbox };
    assert_eq!(fused.bbox, expected_box);
    fused.selected
}

#[test]
fn criterion_03_decision_table() {
    let unit = 0.0..=1.0f64;
    let boxes = (0.0..500.0f64, 0.0..500.0f64, 1.0..200.0f64, 1.0..200.0f64);
    let strategy = (boxes.clone(), boxes, unit.clone(), unit.clone(), unit.clone(), unit);
    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let seen = std::cell::RefCell::new([[0usize; 2]; 2]);
    let result = runner.run(&strategy, |(b1, b2, c1, c2, v1, v2)| {
        let o1 = out(bb(b1.0, b1.1, b1.2, b1.3), c1);
        let o2 = out(bb(b2.0, b2.1, b2.2, b2.3), c2);
        let p1 = (c1 + v1) / 2.0 > 0.5;
        let p2 = (c2 + v2) / 2.0 > 0.5;
        let expected = match (p1, p2) {
            (true, true) | (true, false) | (false, false) => TrackerSlot::First,
            (false, true) => TrackerSlot::Second,
        };
        seen.borrow_mut()[usize::from(p1)][usize::from(p2)] += 1;
        prop_assert_eq!(select_once(o1, o2, v1, v2), expected);
        Ok(())
    });
    // the four corners explicitly: (0.6 + 1) / 2 is present, (0.6 + 0) / 2 absent
    let o = out(bb(0.0, 0.0, 5.0, 5.0), 0.6);
    let corners = [
        ((1.0, 1.0), TrackerSlot::First),
        ((1.0, 0.0), TrackerSlot::First),
        ((0.0, 1.0), TrackerSlot::Second),
        ((0.0, 0.0), TrackerSlot::First),
    ];
    let corners_ok = corners.iter().all(|&((v1, v2), want)| select_once(o, o, v1, v2) == want);
    let seen = seen.into_inner();
    let pass = result.is_ok() && corners_ok && seen.iter().flatten().all(|&n| n > 0);
    report(
        3,
        "selection decision table",
        pass,
        format!("10000 random cases, (p1,p2) counts {seen:?}, violations: {}", if result.is_ok() { 0 } else { 1 }),
    );
    assert!(pass, "{result:?}");
}

fn sum_and_compare(bits: &[bool]) -> bool {
    let sum = bits.iter().filter(|&&b| b).count();
    let threshold = (0.75 * bits.len() as f64).floor() as usize;
    sum > threshold
}

#[test]
fn criterion_04_window_vote_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for &w in &TSTAR_GRID {
        let patterns: Vec<Vec<bool>> = if w <= 10 {
            (0..1u32 << w).map(|m| (0..w).map(|i| m >> i & 1 == 1).collect()).collect()
        } else {
            (0..10_000).map(|_| (0..w).map(|_| rng.random_bool(0.75)).collect()).collect()
        };
        for bits in patterns {
            checked += 1;
            if window_presence(&bits, 0.75) != sum_and_compare(&bits) {
                mismatches += 1;
            }
        }
    }
    let with_sum = |s: usize| -> Vec<bool> { (0..5).map(|i| i < s).collect() };
    let boundary = !window_presence(&with_sum(3), 0.75) && window_presence(&with_sum(4), 0.75);
    let pass = mismatches == 0 && boundary;
    report(
        4,
        "window vote arithmetic",
        pass,
        format!("{checked} patterns over windows {TSTAR_GRID:?}, {mismatches} mismatches, T=5 sum 3 -> 0 and sum 4 -> 1: {boundary}"),
    );
    assert!(pass);
}

fn run(suite: &str, variant: Variant) -> RunReport {
    run_experiment(&ExperimentConfig::for_suite(suite, variant)).unwrap()
}

fn agg(r: &RunReport, metric: &str) -> f64 {
    r.aggregate(metric).unwrap()
}

#[test]
fn criterion_05_fusion_beats_single_trackers() {
    let start = Instant::now();
    let single2 = run("complementary", Variant::Ablation(1));
    let single1 = run("complementary", Variant::Ablation(2));
    let row3 = run("complementary", Variant::Ablation(3));
    let row7 = run("complementary", Variant::Ablation(7));
    let full = run("complementary", Variant::Full);
    let elapsed = start.elapsed();

    let ids = full.sequence_ids();
    let wins = ids
        .iter()
        .filter(|id| {
            let best = single1.metric(id, "ltb_f").unwrap().max(single2.metric(id, "ltb_f").unwrap());
            full.metric(id, "ltb_f").unwrap() > best
        })
        .count();
    let (f3, f7, f9) = (agg(&row3, "ltb_f"), agg(&row7, "ltb_f"), agg(&full, "ltb_f"));
    let pass = ids.len() == 50
        && wins * 5 >= ids.len() * 4
        && f3 <= f7
        && f7 <= f9
        && elapsed < Duration::from_secs(120);
    report(
        5,
        "fusion beats the better single tracker",
        pass,
        format!(
            "wins {wins}/{}, F rows 3/7/9 = {f3:.4} <= {f7:.4} <= {f9:.4}, {elapsed:.2?}",
            ids.len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_baseline_ordering() {
    let average = agg(&run("overconfidence", Variant::Baseline(3)), "ltb_f");
    let max_conf = agg(&run("overconfidence", Variant::Baseline(5)), "ltb_f");
    let max_conf_corr = agg(&run("overconfidence", Variant::Baseline(6)), "ltb_f");
    let full = agg(&run("overconfidence", Variant::Full), "ltb_f");
    let ordering = average < max_conf && max_conf < full;
    let correction_hurts = max_conf_corr < max_conf;
    let pass = ordering && correction_hurts;
    report(
        6,
        "baseline ordering",
        pass,
        format!(
            "average {average:.4} < max-conf {max_conf:.4} < full {full:.4}: {ordering}; \
             max-conf with correction {max_conf_corr:.4} < without {max_conf:.4}: {correction_hurts}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_presence_metrics() {
    let single2 = run("complementary", Variant::Ablation(1));
    let single1 = run("complementary", Variant::Ablation(2));
    let full = run("complementary", Variant::Full);
    let m = |r: &RunReport| {
        (
            agg(r, "presence_accuracy"),
            agg(r, "presence_sensitivity"),
            r.aggregate("presence_specificity").map_or("NA".to_string(), |v| format!("{v:.4}")),
        )
    };
    let (fa, fs, fsp) = m(&full);
    let (a1, s1, sp1) = m(&single1);
    let (a2, s2, sp2) = m(&single2);
    let pass = fa > a1.max(a2) && fs > s1.max(s2);
    report(
        7,
        "fused presence accuracy and sensitivity",
        pass,
        format!(
            "accuracy {fa:.4} vs {a1:.4}/{a2:.4}, sensitivity {fs:.4} vs {s1:.4}/{s2:.4}, \
             specificity {fsp} vs {sp1}/{sp2} (unconstrained)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_window_sweep() {
    let cfg = ExperimentConfig::for_suite("complementary", Variant::Full);
    let sweep = run_sweep(&cfg, &TSTAR_GRID).unwrap();
    let f: Vec<f64> = sweep.rows.iter().map(|r| r.f_score).collect();
    let argmax = f
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let interior = argmax > 0 && argmax < f.len() - 1;
    let pass = interior && f[4] < f[2];
    let table: Vec<String> = TSTAR_GRID.iter().zip(&f).map(|(w, f)| format!("{w}:{f:.4}")).collect();
    report(
        8,
        "window sweep peaks inside the grid",
        pass,
        format!("F by window {}, best at {}", table.join(" "), TSTAR_GRID[argmax]),
    );
    assert!(pass);
}

fn read_tree(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn criterion_09_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let mut total = 0;
    let mut identical = true;
    for (i, (suite, variant)) in [
        ("complementary", Variant::Full),
        ("overconfidence", Variant::Baseline(6)),
        ("no-absence", Variant::Ablation(7)),
    ]
    .into_iter()
    .enumerate()
    {
        let mut cfg = ExperimentConfig::for_suite(suite, variant);
        cfg.set("seeds", "11,12").unwrap();
        cfg.set("limit", "6").unwrap();
        let a = tmp.path().join(format!("{i}-a"));
        let b = tmp.path().join(format!("{i}-b"));
        write_report(&run_experiment(&cfg).unwrap(), &a).unwrap();
        write_report(&run_experiment(&cfg).unwrap(), &b).unwrap();
        let (ta, tb) = (read_tree(&a), read_tree(&b));
        total += ta.len();
        identical &= !ta.is_empty() && ta == tb;
    }
    report(
        9,
        "repeated runs are byte-identical",
        identical,
        format!("{total} report files compared across 3 experiments"),
    );
    assert!(identical);
}

#[test]
fn criterion_10_replay_fidelity() {
    let tmp = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut direct = Vec::new();
    for i in 0..4 {
        let name = format!("seq{i}");
        let (trace, mut gt) = random_toy(&mut rng, &name, 120);
        gt.name = name.clone();
        let dir = tmp.path().join(&name);
        std::fs::create_dir_all(&dir).unwrap();
        export_groundtruth(&dir.join("groundtruth.txt"), &gt).unwrap();
        let log = TrackerLog {
            name: "tracker1".into(),
            records: trace
                .frames
                .iter()
                .map(|&output| LogRecord {
                    output,
                    verifier_score: None,
                })
                .collect(),
        };
        write_log_file(&dir.join("tracker1.csv"), &log).unwrap();
        direct.push((trace, gt));
    }

    let replayed = run_experiment(&ExperimentConfig::for_dataset(tmp.path(), Variant::Ablation(2))).unwrap();
    let pairs: Vec<_> = direct.iter().map(|(t, g)| (t, g)).collect();
    let (expected, _) = score_sequences(&pairs).unwrap();
    let mut worst: f64 = 0.0;
    let mut same_shape = expected.len() == replayed.metrics.len();
    for (e, r) in expected.iter().zip(&replayed.metrics) {
        same_shape &= e.sequence == r.sequence && e.metric == r.metric;
        match (e.value, r.value) {
            (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
            (None, None) => {}
            _ => same_shape = false,
        }
    }

    let correcting: Vec<Variant> = Variant::ABLATION_ROWS
        .iter()
        .chain(Variant::BASELINE_ROWS.iter())
        .copied()
        .filter(|v| v.corrects(&ExperimentConfig::for_suite("complementary", *v).controller_config().unwrap()))
        .collect();
    let rejected = correcting.iter().all(|&v| {
        matches!(
            run_experiment(&ExperimentConfig::for_dataset(tmp.path(), v)),
            Err(ExperimentError::ReplayCorrection(_))
        )
    });
    let mut forced = ExperimentConfig::for_dataset(tmp.path(), Variant::Ablation(2));
    forced.set("variant", "ablation-3").unwrap();
    forced.set("enable_correction", "true").unwrap();
    let forced_rejected = matches!(run_experiment(&forced), Err(ExperimentError::ReplayCorrection(_)));

    let pass = same_shape && worst <= 1e-9 && rejected && !correcting.is_empty() && forced_rejected;
    let ids: Vec<String> = correcting.iter().map(Variant::id).collect();
    report(
        10,
        "replay fidelity",
        pass,
        format!(
            "max |diff| {worst:.2e} over {} rows; rejected on replay: {} and ablation-3 with correction forced on",
            expected.len(),
            ids.join(", ")
        ),
    );
    assert!(pass);
    assert!(replayed.metrics.iter().any(|r| r.sequence == AGGREGATE));
}
