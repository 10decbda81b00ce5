//! Experiment grid, runner and result persistence.

mod config;
mod report;
mod runner;
mod scoring;
mod variant;

use std::path::PathBuf;

use thiserror::Error;

use crate::formats::FormatError;
use crate::fusion::FusionError;
use crate::metrics::MetricsError;
use crate::sim::SimError;

pub use config::{ExperimentConfig, InputSource};
pub use report::{emit_plot_data, rescore, run_sweep, score_dirs, write_report, write_sweep, SweepResult};
pub use runner::{drive, export_suite, load_dataset, run_experiment, run_on_suite, RunReport, SequenceRun};
pub use scoring::{score_sequences, AGGREGATE, METRIC_NAMES};
pub use variant::{PipelineKind, Variant};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config line {line}: {message}")]
    ConfigLine { line: usize, message: String },
    #[error("{0}")]
    Config(String),
    #[error("variant {0} corrects trackers, which replayed logs cannot honor")]
    ReplayCorrection(String),
    #[error("{0}")]
    Input(String),
    #[error("sequence '{sequence}': {message}")]
    Sequence { sequence: String, message: String },
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl From<FusionError> for ExperimentError {
    fn from(e: FusionError) -> Self {
        match e {
            FusionError::Config(m) => ExperimentError::Config(m),
            other => ExperimentError::Input(other.to_string()),
        }
    }
}

/// Broad failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Parse,
    Config,
    Runtime,
}

impl ExperimentError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            ExperimentError::ConfigLine { .. } | ExperimentError::Format(_) => ErrorCategory::Parse,
            ExperimentError::Config(_)
            | ExperimentError::ReplayCorrection(_)
            | ExperimentError::Input(_)
            | ExperimentError::Sim(_) => ErrorCategory::Config,
            ExperimentError::Sequence { .. } | ExperimentError::Io { .. } | ExperimentError::Metrics(_) => {
                ErrorCategory::Runtime
            }
        }
    }
}
