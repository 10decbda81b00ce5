use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::formats::{export_groundtruth, parse_groundtruth, parse_log, write_log_file, LogRecord, MetricRow, TrackerLog};
use crate::fusion::{
    BaselineFusion, Controller, ControllerConfig, FusionPipeline, HookStats, SingleTracker, TrackerSlot,
};
use crate::metrics::{MetricCurves, PredictionTrace};
use crate::replay::{ReplayTracker, ReplayVerifier};
use crate::sequence::SequenceGroundTruth;
use crate::sim::{
    derive_seed, generate_world, suite, EventLog, ScriptedTracker, ScriptedVerifier, SequenceSpec, SimEvent,
    Suite,
};
use crate::tracker_api::{FrameHandle, Tracker, TrackerOutput, Verifier};

use super::scoring::{score_sequences, AGGREGATE};
use super::{ExperimentConfig, ExperimentError, InputSource, PipelineKind, Variant};

/// One sequence (and seed) of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRun {
    pub id: String,
    pub groundtruth: SequenceGroundTruth,
    /// Frame 0 holds the initialization box with confidence 1.
    pub trace: PredictionTrace,
    /// Output presence for frames 1 onwards.
    pub presence: Vec<bool>,
    /// Raw tracker confidences for frames 1 onwards.
    pub raw_confidences: Vec<[Option<f64>; 2]>,
    pub events: Vec<(TrackerSlot, SimEvent)>,
    pub stats: HookStats,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: Vec<(String, String)>,
    pub variant: Variant,
    /// Sorted by sequence id.
    pub runs: Vec<SequenceRun>,
    pub metrics: Vec<MetricRow>,
    pub curves: Vec<MetricCurves>,
    pub event_counts: BTreeMap<String, u64>,
    /// Correction was requested but no tracker accepted an override.
    pub correction_degraded: bool,
    pub elapsed: Duration,
}

impl RunReport {
    pub fn metric(&self, sequence: &str, metric: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|r| r.sequence == sequence && r.metric == metric)
            .and_then(|r| r.value)
    }

    pub fn aggregate(&self, metric: &str) -> Option<f64> {
        self.metric(AGGREGATE, metric)
    }

    pub fn sequence_ids(&self) -> Vec<&str> {
        self.runs.iter().map(|r| r.id.as_str()).collect()
    }
}

struct Job {
    id: String,
    source: JobSource,
}

enum JobSource {
    Sim { spec: SequenceSpec, seed: u64 },
    Replay { gt: SequenceGroundTruth, logs: [Option<Arc<TrackerLog>>; 2] },
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    let sim_suite = match &config.input {
        InputSource::Suite(name) => Some(suite(name)?),
        InputSource::Dataset(_) => None,
    };
    execute(config, sim_suite)
}

/// Runs a simulated experiment on an explicitly given suite instead of the
/// preset named in the configuration.
pub fn run_on_suite(config: &ExperimentConfig, sim_suite: Suite) -> Result<RunReport, ExperimentError> {
    let mut config = config.clone();
    config.input = InputSource::Suite(sim_suite.name.clone());
    execute(&config, Some(sim_suite))
}

fn execute(config: &ExperimentConfig, sim_suite: Option<Suite>) -> Result<RunReport, ExperimentError> {
    let start = Instant::now();
    let controller = config.validate()?;
    let jobs = plan(config, sim_suite.as_ref())?;

    let mut runs = jobs
        .into_par_iter()
        .map(|job| run_job(job, config.variant, &controller, sim_suite.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    runs.sort_by(|a, b| a.id.cmp(&b.id));

    let pairs: Vec<_> = runs.iter().map(|r| (&r.trace, &r.groundtruth)).collect();
    let (metrics, curves) = score_sequences(&pairs)?;

    let mut event_counts = BTreeMap::new();
    let mut total = HookStats::default();
    for r in &runs {
        for (slot, e) in &r.events {
            *event_counts
                .entry(format!("tracker{}.{}", slot.id(), e.kind.label()))
                .or_insert(0) += 1;
        }
        total.add(&r.stats);
    }
    for (k, v) in total.entries() {
        event_counts.insert(k.to_string(), v);
    }

    Ok(RunReport {
        config: config.echo()?,
        variant: config.variant,
        correction_degraded: config.variant.corrects(&controller) && total.correction_degraded(),
        runs,
        metrics,
        curves,
        event_counts,
        elapsed: start.elapsed(),
    })
}

fn plan(config: &ExperimentConfig, sim_suite: Option<&Suite>) -> Result<Vec<Job>, ExperimentError> {
    let limit = config.limit.unwrap_or(usize::MAX);
    let multi_seed = config.seeds.len() > 1;
    let id = |name: &str, seed: u64| {
        if multi_seed {
            format!("{name}@{seed}")
        } else {
            name.to_string()
        }
    };
    match &config.input {
        InputSource::Suite(_) => {
            let s = sim_suite.expect("simulated input without a suite");
            let mut jobs = Vec::new();
            for spec in s.specs.iter().take(limit) {
                for &seed in &config.seeds {
                    jobs.push(Job {
                        id: id(&spec.name, seed),
                        source: JobSource::Sim {
                            spec: spec.clone(),
                            seed,
                        },
                    });
                }
            }
            Ok(jobs)
        }
        InputSource::Dataset(dir) => {
            let mut jobs = Vec::new();
            for (gt, logs) in load_dataset(dir, config.variant)?.into_iter().take(limit) {
                // replayed runs are identical across seeds
                jobs.push(Job {
                    id: gt.name.clone(),
                    source: JobSource::Replay { gt, logs },
                });
            }
            Ok(jobs)
        }
    }
}

type DatasetEntry = (SequenceGroundTruth, [Option<Arc<TrackerLog>>; 2]);

/// Reads `<dir>/<sequence>/groundtruth.txt` plus the tracker logs the
/// variant needs, in sequence-name order.
pub fn load_dataset(dir: &Path, variant: Variant) -> Result<Vec<DatasetEntry>, ExperimentError> {
    let io = |e| ExperimentError::Io {
        path: dir.to_path_buf(),
        source: e,
    };
    let mut seq_dirs: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    seq_dirs.sort();
    if seq_dirs.is_empty() {
        return Err(ExperimentError::Input(format!("{}: no sequence directories", dir.display())));
    }
    let needed = variant.trackers_used();
    let mut out = Vec::new();
    for seq in seq_dirs {
        let name = seq.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let mut gt = parse_groundtruth(&seq.join("groundtruth.txt")).map_err(|e| ExperimentError::Sequence {
            sequence: name.clone(),
            message: e.to_string(),
        })?;
        gt.name = name.clone();
        let mut logs: [Option<Arc<TrackerLog>>; 2] = [None, None];
        for slot in [TrackerSlot::First, TrackerSlot::Second] {
            let path = seq.join(format!("tracker{}.csv", slot.id()));
            if path.exists() {
                let log = parse_log(&path).map_err(|e| ExperimentError::Sequence {
                    sequence: name.clone(),
                    message: format!("{}: {e}", path.display()),
                })?;
                logs[slot.index()] = Some(Arc::new(log));
            } else if needed.contains(&slot) {
                return Err(ExperimentError::Sequence {
                    sequence: name.clone(),
                    message: format!("missing {}", path.display()),
                });
            }
        }
        out.push((gt, logs));
    }
    Ok(out)
}

fn run_job(
    job: Job,
    variant: Variant,
    cfg: &ControllerConfig,
    sim_suite: Option<&Suite>,
) -> Result<SequenceRun, ExperimentError> {
    let seq_err = |id: &str, e: &dyn std::fmt::Display| ExperimentError::Sequence {
        sequence: id.to_string(),
        message: e.to_string(),
    };
    let (gt, trackers, verifier, event_logs) = match job.source {
        JobSource::Sim { spec, seed } => {
            let s = sim_suite.expect("simulated job without a suite");
            let world = Arc::new(generate_world(&spec)?);
            let run_seed = derive_seed(spec.seed, &format!("run-{seed}"));
            let t1 = ScriptedTracker::new(s.tracker1.clone(), Arc::clone(&world), run_seed, "tracker1")?;
            let t2 = ScriptedTracker::new(s.tracker2.clone(), Arc::clone(&world), run_seed, "tracker2")?;
            let logs: [Option<EventLog>; 2] = [Some(t1.event_log()), Some(t2.event_log())];
            let v = ScriptedVerifier::new(s.verifier, Arc::clone(&world), run_seed, "verifier")?;
            let mut gt = world.truth.clone();
            gt.name = job.id.clone();
            let trackers: [Option<Box<dyn Tracker>>; 2] = [Some(Box::new(t1)), Some(Box::new(t2))];
            (gt, trackers, Some(Box::new(v) as Box<dyn Verifier>), logs)
        }
        JobSource::Replay { gt, logs } => {
            let trackers = logs
                .clone()
                .map(|l| l.map(|l| Box::new(ReplayTracker::new(l)) as Box<dyn Tracker>));
            let verifier = Box::new(ReplayVerifier::new(logs.into_iter().flatten().collect()));
            (gt, trackers, Some(verifier as Box<dyn Verifier>), [None, None])
        }
    };

    let pipeline = build_pipeline(variant, cfg, trackers, verifier).map_err(|e| seq_err(&job.id, &e))?;
    let mut run = drive(pipeline, gt, &job.id)?;
    for (i, log) in event_logs.iter().enumerate() {
        if let Some(log) = log {
            let slot = if i == 0 { TrackerSlot::First } else { TrackerSlot::Second };
            let events = log.lock().expect("event log poisoned");
            run.events.extend(events.iter().map(|e| (slot, *e)));
        }
    }
    run.events.sort_by_key(|(slot, e)| (e.frame, slot.index()));
    Ok(run)
}

fn build_pipeline(
    variant: Variant,
    cfg: &ControllerConfig,
    trackers: [Option<Box<dyn Tracker>>; 2],
    verifier: Option<Box<dyn Verifier>>,
) -> Result<Box<dyn FusionPipeline>, ExperimentError> {
    let [t1, t2] = trackers;
    let missing = |what: &str| ExperimentError::Input(format!("{variant} needs {what}"));
    Ok(match variant.kind() {
        PipelineKind::Single(slot) => {
            let t = if slot == TrackerSlot::First { t1 } else { t2 };
            Box::new(SingleTracker::new(slot, t.ok_or_else(|| missing(&format!("tracker {}", slot.id())))?))
        }
        PipelineKind::Baseline(kind) => Box::new(BaselineFusion::new(
            kind,
            t1.ok_or_else(|| missing("tracker 1"))?,
            t2.ok_or_else(|| missing("tracker 2"))?,
        )),
        PipelineKind::Controller => Box::new(Controller::new(
            cfg.clone(),
            t1.ok_or_else(|| missing("tracker 1"))?,
            t2.ok_or_else(|| missing("tracker 2"))?,
            verifier.ok_or_else(|| missing("a verifier"))?,
        )?),
    })
}

/// Initializes on frame 0 with the ground truth and steps every other frame.
pub fn drive(
    mut pipeline: Box<dyn FusionPipeline>,
    gt: SequenceGroundTruth,
    id: &str,
) -> Result<SequenceRun, ExperimentError> {
    let fail = |e: &dyn std::fmt::Display| ExperimentError::Sequence {
        sequence: id.to_string(),
        message: e.to_string(),
    };
    let init = gt
        .initial_box()
        .ok_or_else(|| fail(&"target must be visible on frame 0"))?;
    pipeline.init(&FrameHandle::new(0), init).map_err(|e| fail(&e))?;
    let n = gt.len();
    let mut frames = Vec::with_capacity(n);
    frames.push(TrackerOutput {
        bbox: init,
        confidence: 1.0,
    });
    let mut presence = Vec::with_capacity(n.saturating_sub(1));
    let mut raw = Vec::with_capacity(n.saturating_sub(1));
    for t in 1..n {
        let step = pipeline.step(&FrameHandle::new(t)).map_err(|e| fail(&e))?;
        frames.push(step.output);
        presence.push(step.presence);
        raw.push(step.raw_confidences);
    }
    Ok(SequenceRun {
        id: id.to_string(),
        trace: PredictionTrace::new(id, frames),
        groundtruth: gt,
        presence,
        raw_confidences: raw,
        events: Vec::new(),
        stats: pipeline.stats(),
    })
}

/// Writes a simulated suite in the replay dataset layout: per sequence a
/// directory with `groundtruth.txt` and each tracker's standalone log, with
/// the verifier's score of every logged box. The trackers run uncorrected,
/// so the result replays exactly under any non-correcting variant.
pub fn export_suite(sim_suite: &Suite, seed: u64, limit: Option<usize>, dir: &Path) -> Result<usize, ExperimentError> {
    let specs: Vec<&SequenceSpec> = sim_suite.specs.iter().take(limit.unwrap_or(usize::MAX)).collect();
    specs
        .par_iter()
        .map(|spec| export_sequence(sim_suite, spec, seed, dir))
        .collect::<Result<Vec<()>, _>>()?;
    Ok(specs.len())
}

fn export_sequence(s: &Suite, spec: &SequenceSpec, seed: u64, dir: &Path) -> Result<(), ExperimentError> {
    let fail = |e: &dyn std::fmt::Display| ExperimentError::Sequence {
        sequence: spec.name.clone(),
        message: e.to_string(),
    };
    let world = Arc::new(generate_world(spec)?);
    let run_seed = derive_seed(spec.seed, &format!("run-{seed}"));
    let mut verifier = ScriptedVerifier::new(s.verifier, Arc::clone(&world), run_seed, "verifier")?;
    let mut trackers = [
        ScriptedTracker::new(s.tracker1.clone(), Arc::clone(&world), run_seed, "tracker1")?,
        ScriptedTracker::new(s.tracker2.clone(), Arc::clone(&world), run_seed, "tracker2")?,
    ];
    let gt = &world.truth;
    let init = gt.initial_box().ok_or_else(|| fail(&"target must be visible on frame 0"))?;
    let first = LogRecord {
        output: TrackerOutput {
            bbox: init,
            confidence: 1.0,
        },
        verifier_score: Some(1.0),
    };
    let mut logs: [Vec<LogRecord>; 2] = [vec![first], vec![first]];
    for t in &mut trackers {
        t.init(&FrameHandle::new(0), init).map_err(|e| fail(&e))?;
    }
    for i in 1..gt.len() {
        let frame = FrameHandle::new(i);
        for (t, log) in trackers.iter_mut().zip(logs.iter_mut()) {
            let output = t.step(&frame).map_err(|e| fail(&e))?;
            let score = verifier.score(&frame, &output.bbox).map_err(|e| fail(&e))?;
            log.push(LogRecord {
                output,
                verifier_score: Some(score),
            });
        }
    }

    let seq_dir = dir.join(&spec.name);
    std::fs::create_dir_all(&seq_dir).map_err(|source| ExperimentError::Io {
        path: seq_dir.clone(),
        source,
    })?;
    export_groundtruth(&seq_dir.join("groundtruth.txt"), gt)?;
    for (slot, records) in logs.into_iter().enumerate() {
        let log = TrackerLog {
            name: format!("tracker{}", slot + 1),
            records,
        };
        write_log_file(&seq_dir.join(format!("tracker{}.csv", slot + 1)), &log)?;
    }
    Ok(())
}
