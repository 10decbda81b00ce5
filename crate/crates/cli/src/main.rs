use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cocolot_core::experiment::{
    export_suite, rescore, run_experiment, run_sweep, score_dirs, write_report, write_sweep, ErrorCategory,
    ExperimentConfig, ExperimentError, AGGREGATE, METRIC_NAMES,
};
use cocolot_core::formats::{write_curves, write_metrics, FormatError, MetricRow};
use cocolot_core::metrics::TSTAR_GRID;
use cocolot_core::sim::suite;

#[derive(Parser)]
#[command(name = "cocolot", version, about = "Fuse two long-term trackers and score the result")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(RunArgs),
    /// Score existing traces against ground truth.
    Score(ScoreArgs),
    /// Export a simulated suite as a replayable dataset.
    Gen(GenArgs),
    /// Run the experiment once per presence window size.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// `key = value` experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    variant: Option<String>,
    /// Seed, or comma-separated seed list.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    /// Replay dataset directory instead of a simulated suite.
    #[arg(long, conflicts_with = "suite")]
    dataset: Option<PathBuf>,
    /// Run only the first N sequences.
    #[arg(long)]
    limit: Option<usize>,
    /// Extra controller setting, e.g. `--set window=10`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    settings: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Presence window length.
    #[arg(long = "that", value_name = "T")]
    window: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    /// A directory written by `run`; scores its traces against its ground truth.
    #[arg(long, conflicts_with_all = ["gt", "traces"])]
    report: Option<PathBuf>,
    /// Directory of `<name>.txt` ground-truth files.
    #[arg(long, requires = "traces")]
    gt: Option<PathBuf>,
    /// Directory of `<name>.csv` traces or tracker logs.
    #[arg(long, requires = "gt")]
    traces: Option<PathBuf>,
    /// Where to write metrics.csv and curves.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "complementary")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Window lengths to try.
    #[arg(long, value_delimiter = ',', default_values_t = TSTAR_GRID)]
    windows: Vec<usize>,
}

impl ExperimentArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => ExperimentConfig::parse("")?,
        };
        if let Some(s) = &self.suite {
            cfg.set("suite", s)?;
        }
        if let Some(d) = &self.dataset {
            cfg.set("dataset", &d.display().to_string())?;
        }
        if let Some(v) = &self.variant {
            cfg.set("variant", v)?;
        }
        if let Some(s) = &self.seed {
            cfg.set("seeds", s)?;
        }
        if let Some(n) = self.limit {
            cfg.set("limit", &n.to_string())?;
        }
        for kv in &self.settings {
            let Some((k, v)) = kv.split_once('=') else {
                bail!(ExperimentError::Config(format!("--set expects KEY=VALUE, got '{kv}'")));
            };
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(cfg.variant.id()))
}

fn print_summary(rows: &[MetricRow]) {
    for name in METRIC_NAMES {
        let value = rows
            .iter()
            .find(|r| r.sequence == AGGREGATE && r.metric == name)
            .and_then(|r| r.value);
        match value {
            Some(v) => println!("{name:<22} {v:.4}"),
            None => println!("{name:<22} NA"),
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = args.exp.load()?;
    if let Some(w) = args.window {
        cfg.set("window", &w.to_string())?;
    }
    let report = run_experiment(&cfg)?;
    let dir = out_dir(&cfg);
    write_report(&report, &dir)?;
    if report.correction_degraded {
        eprintln!("warning: correction requested but no tracker accepted an override");
    }
    println!("{} on {} sequences -> {}", report.variant, report.runs.len(), dir.display());
    print_summary(&report.metrics);
    Ok(())
}

fn score(args: ScoreArgs) -> Result<()> {
    let (rows, curves) = match (&args.report, &args.gt, &args.traces) {
        (Some(dir), _, _) => rescore(dir)?,
        (None, Some(gt), Some(traces)) => score_dirs(gt, traces)?,
        _ => bail!(ExperimentError::Config("score needs --report, or --gt with --traces".into())),
    };
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        write_metrics(create(&out.join("metrics.csv"))?, &rows)?;
        write_curves(create(&out.join("curves.csv"))?, &curves)?;
    }
    print_summary(&rows);
    Ok(())
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn gen(args: GenArgs) -> Result<()> {
    let s = suite(&args.suite).map_err(ExperimentError::from)?;
    let n = export_suite(&s, args.seed, args.limit, &args.out)?;
    println!("wrote {n} sequences of '{}' to {}", args.suite, args.out.display());
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    if args.windows.is_empty() || args.windows.contains(&0) {
        bail!(ExperimentError::Config("window lengths must be positive".into()));
    }
    let cfg = args.exp.load()?;
    let result = run_sweep(&cfg, &args.windows)?;
    let dir = out_dir(&cfg);
    write_sweep(&result, &dir)?;
    println!("{:>6} {:>8} {:>10} {:>8}", "window", "ltb_f", "precision", "recall");
    for r in &result.rows {
        println!("{:>6} {:>8.4} {:>10.4} {:>8.4}", r.window, r.f_score, r.precision, r.recall);
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<ExperimentError>() {
            return match e.category() {
                ErrorCategory::Parse => 3,
                ErrorCategory::Config => 4,
                ErrorCategory::Runtime => 5,
            };
        }
        if cause.downcast_ref::<FormatError>().is_some() {
            return 3;
        }
    }
    5
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Score(a) => score(a),
        Command::Gen(a) => gen(a),
        Command::Sweep(a) => sweep(a),
    };
    eprintln!("elapsed {:.2?}", start.elapsed());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
