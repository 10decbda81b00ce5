use std::fmt;
use std::str::FromStr;

use crate::fusion::{BaselineKind, CombinationMode, ControllerConfig, TrackerSlot};

use super::ExperimentError;

/// A row of the ablation or baseline grids.
///
/// `ablation-1`/`ablation-2` (and `baseline-1`/`baseline-2`) run the coarse
/// tracker and the accurate tracker alone. `ablation-3` to `ablation-9` add
/// the fusion ingredients one at a time; `baseline-3` to `baseline-6` are the
/// averaging and max-confidence strategies. `ablation-9`, `baseline-8` and
/// `cocolot-full` are the same complete controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Ablation(u8),
    Baseline(u8),
    Full,
}

/// What a variant executes.
#[derive(Debug, Clone, PartialEq)]
pub enum PipelineKind {
    Single(TrackerSlot),
    Controller,
    Baseline(BaselineKind),
}

impl Variant {
    pub const ABLATION_ROWS: [Variant; 9] = [
        Variant::Ablation(1),
        Variant::Ablation(2),
        Variant::Ablation(3),
        Variant::Ablation(4),
        Variant::Ablation(5),
        Variant::Ablation(6),
        Variant::Ablation(7),
        Variant::Ablation(8),
        Variant::Ablation(9),
    ];

    pub const BASELINE_ROWS: [Variant; 7] = [
        Variant::Baseline(1),
        Variant::Baseline(2),
        Variant::Baseline(3),
        Variant::Baseline(4),
        Variant::Baseline(5),
        Variant::Baseline(6),
        Variant::Baseline(8),
    ];

    pub fn id(&self) -> String {
        match self {
            Variant::Ablation(n) => format!("ablation-{n}"),
            Variant::Baseline(n) => format!("baseline-{n}"),
            Variant::Full => "cocolot-full".into(),
        }
    }

    pub fn kind(&self) -> PipelineKind {
        match *self {
            Variant::Ablation(1) | Variant::Baseline(1) => PipelineKind::Single(TrackerSlot::Second),
            Variant::Ablation(2) | Variant::Baseline(2) => PipelineKind::Single(TrackerSlot::First),
            Variant::Baseline(3) => PipelineKind::Baseline(BaselineKind::Average { correct_both: false }),
            Variant::Baseline(4) => PipelineKind::Baseline(BaselineKind::Average { correct_both: true }),
            Variant::Baseline(5) => PipelineKind::Baseline(BaselineKind::MaxConfidence { correct_other: false }),
            Variant::Baseline(6) => PipelineKind::Baseline(BaselineKind::MaxConfidence { correct_other: true }),
            _ => PipelineKind::Controller,
        }
    }

    /// Sets the controller switches that define this row.
    pub fn configure(&self, cfg: &mut ControllerConfig) {
        let (mode, correction, scale, aspect) = match *self {
            Variant::Ablation(3) => (CombinationMode::VerifierOnly, false, false, false),
            Variant::Ablation(4) => (CombinationMode::Combined, false, false, false),
            Variant::Ablation(5) => (CombinationMode::Combined, true, false, false),
            Variant::Ablation(6) => (CombinationMode::Windowed, false, false, false),
            Variant::Ablation(7) => (CombinationMode::Windowed, true, false, false),
            Variant::Ablation(8) => (CombinationMode::Windowed, true, true, false),
            _ => (CombinationMode::Windowed, true, true, true),
        };
        cfg.combination_mode = mode;
        cfg.enable_correction = correction;
        cfg.enable_search_scale_heuristic = scale;
        cfg.enable_aspect_penalty = aspect;
    }

    /// Whether running this row with `cfg` issues state overrides.
    pub fn corrects(&self, cfg: &ControllerConfig) -> bool {
        match self.kind() {
            PipelineKind::Single(_) => false,
            PipelineKind::Controller => cfg.enable_correction,
            PipelineKind::Baseline(BaselineKind::Average { correct_both }) => correct_both,
            PipelineKind::Baseline(BaselineKind::MaxConfidence { correct_other }) => correct_other,
        }
    }

    /// Tracker logs a replayed run of this row reads.
    pub fn trackers_used(&self) -> Vec<TrackerSlot> {
        match self.kind() {
            PipelineKind::Single(slot) => vec![slot],
            _ => vec![TrackerSlot::First, TrackerSlot::Second],
        }
    }

    pub fn uses_verifier(&self) -> bool {
        self.kind() == PipelineKind::Controller
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Variant {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || ExperimentError::Config(format!("unknown variant '{s}'"));
        if s == "cocolot-full" {
            return Ok(Variant::Full);
        }
        let (prefix, n) = s.rsplit_once('-').ok_or_else(unknown)?;
        let n: u8 = n.parse().map_err(|_| unknown())?;
        match (prefix, n) {
            ("ablation", 1..=9) => Ok(Variant::Ablation(n)),
            ("baseline", 1..=6 | 8) => Ok(Variant::Baseline(n)),
            _ => Err(unknown()),
        }
    }
}
