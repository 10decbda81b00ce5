use std::fs;
use std::path::{Path, PathBuf};

use crate::formats::{
    export_groundtruth, parse_groundtruth, parse_log, write_curves, write_log_file, write_metrics, write_table,
    MetricRow, TrackerLog,
};
use crate::metrics::{tstar_sweep, MetricCurves, TStarRow};

use super::scoring::score_sequences;
use super::{run_experiment, ExperimentConfig, ExperimentError, RunReport};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn mkdir(path: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn create(path: &Path) -> Result<fs::File, ExperimentError> {
    fs::File::create(path).map_err(io_err(path))
}

/// Writes the whole report under `dir`:
/// `config.txt`, `metrics.csv`, `curves.csv`, `events.csv`, `counters.csv`,
/// and per sequence `traces/<id>.csv`, `groundtruth/<id>.txt` and
/// `timelines/<id>.csv`. Every file is a pure function of the
/// configuration, so repeated runs produce identical bytes. Wall-clock time
/// is deliberately left out.
pub fn write_report(report: &RunReport, dir: &Path) -> Result<(), ExperimentError> {
    mkdir(dir)?;
    let config: String = report.config.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    let path = dir.join("config.txt");
    fs::write(&path, config).map_err(io_err(&path))?;

    write_metrics(create(&dir.join("metrics.csv"))?, &report.metrics)?;

    let events: Vec<Vec<String>> = report
        .runs
        .iter()
        .flat_map(|r| {
            r.events.iter().map(|(slot, e)| {
                vec![
                    r.id.clone(),
                    format!("tracker{}", slot.id()),
                    e.frame.to_string(),
                    e.kind.label().to_string(),
                ]
            })
        })
        .collect();
    write_table(create(&dir.join("events.csv"))?, &["sequence", "source", "frame", "event"], &events)?;

    let counters: Vec<Vec<String>> = report
        .event_counts
        .iter()
        .map(|(k, v)| vec![k.clone(), v.to_string()])
        .collect();
    write_table(create(&dir.join("counters.csv"))?, &["counter", "value"], &counters)?;

    let traces = dir.join("traces");
    let gts = dir.join("groundtruth");
    mkdir(&traces)?;
    mkdir(&gts)?;
    for r in &report.runs {
        write_log_file(&traces.join(format!("{}.csv", r.id)), &TrackerLog::from_trace(&r.trace))?;
        export_groundtruth(&gts.join(format!("{}.txt", r.id)), &r.groundtruth)?;
    }
    emit_plot_data(report, dir)
}

/// Curve samples (`curves.csv`) and per-sequence presence timelines
/// (`timelines/<id>.csv`, one row per scored frame).
pub fn emit_plot_data(report: &RunReport, dir: &Path) -> Result<(), ExperimentError> {
    mkdir(dir)?;
    write_curves(create(&dir.join("curves.csv"))?, &report.curves)?;
    let timelines = dir.join("timelines");
    mkdir(&timelines)?;
    let opt = |c: Option<f64>| c.map_or_else(String::new, |c| c.to_string());
    for r in &report.runs {
        let rows: Vec<Vec<String>> = (1..r.groundtruth.len())
            .map(|t| {
                let raw = r.raw_confidences[t - 1];
                vec![
                    t.to_string(),
                    u8::from(r.groundtruth.is_visible(t)).to_string(),
                    u8::from(r.presence[t - 1]).to_string(),
                    opt(raw[0]),
                    opt(raw[1]),
                ]
            })
            .collect();
        write_table(
            create(&timelines.join(format!("{}.csv", r.id)))?,
            &["t", "gt_presence", "fused", "tracker1_conf", "tracker2_conf"],
            &rows,
        )?;
    }
    Ok(())
}

fn files_with_ext(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, ExperimentError> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(dir))?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == ext))
        .collect();
    out.sort();
    Ok(out)
}

/// Scores every `<traces>/<name>.csv` against `<gt>/<name>.txt`.
pub fn score_dirs(gt_dir: &Path, traces_dir: &Path) -> Result<(Vec<MetricRow>, Vec<MetricCurves>), ExperimentError> {
    let mut traces = Vec::new();
    let mut gts = Vec::new();
    for path in files_with_ext(traces_dir, "csv")? {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let gt_path = gt_dir.join(format!("{stem}.txt"));
        let seq_err = |e: &dyn std::fmt::Display| ExperimentError::Sequence {
            sequence: stem.clone(),
            message: e.to_string(),
        };
        if !gt_path.exists() {
            return Err(seq_err(&format!("no ground truth at {}", gt_path.display())));
        }
        traces.push(parse_log(&path).map_err(|e| seq_err(&e))?.to_trace());
        gts.push(parse_groundtruth(&gt_path).map_err(|e| seq_err(&e))?);
    }
    if traces.is_empty() {
        return Err(ExperimentError::Input(format!("{}: no traces", traces_dir.display())));
    }
    let pairs: Vec<_> = traces.iter().zip(&gts).collect();
    Ok(score_sequences(&pairs)?)
}

/// Re-scores a directory written by [`write_report`].
pub fn rescore(dir: &Path) -> Result<(Vec<MetricRow>, Vec<MetricCurves>), ExperimentError> {
    score_dirs(&dir.join("groundtruth"), &dir.join("traces"))
}

pub struct SweepResult {
    pub rows: Vec<TStarRow>,
    pub reports: Vec<RunReport>,
}

/// Runs the experiment once per window size.
pub fn run_sweep(config: &ExperimentConfig, windows: &[usize]) -> Result<SweepResult, ExperimentError> {
    let mut reports = Vec::with_capacity(windows.len());
    for &w in windows {
        let mut cfg = config.clone();
        cfg.set("window", &w.to_string())?;
        reports.push(run_experiment(&cfg)?);
    }
    let runs: Vec<(usize, Vec<_>)> = windows
        .iter()
        .zip(&reports)
        .map(|(&w, r)| (w, r.runs.iter().map(|s| (&s.trace, &s.groundtruth)).collect()))
        .collect();
    let rows = tstar_sweep(&runs)?;
    Ok(SweepResult { rows, reports })
}

/// `sweep.csv` plus one full report per window under `window-<n>/`.
pub fn write_sweep(result: &SweepResult, dir: &Path) -> Result<(), ExperimentError> {
    mkdir(dir)?;
    let rows: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|r| {
            vec![
                r.window.to_string(),
                r.f_score.to_string(),
                r.precision.to_string(),
                r.recall.to_string(),
            ]
        })
        .collect();
    write_table(
        create(&dir.join("sweep.csv"))?,
        &["window", "ltb_f", "ltb_precision", "ltb_recall"],
        &rows,
    )?;
    for (row, report) in result.rows.iter().zip(&result.reports) {
        write_report(report, &dir.join(format!("window-{}", row.window)))?;
    }
    Ok(())
}
